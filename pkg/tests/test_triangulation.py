from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from segfib.families import AffineMap, NakajimaSpec, make_nakajima, make_nakajima_tower, make_pm, unit_square
from segfib.polytope import LatticePolytope, unit_cube
from segfib.triangulation import (
    ConstructionError,
    FaceCompatibilityError,
    TriangulationComplex,
    build_pi_triangulation,
    certify,
    check_complex,
    fibered_subdivision,
    is_flag,
    is_regular,
    is_unimodular_triangulation,
    point_triangulation,
    random_enumeration,
    refines,
    square_triangulation,
    tower_triangulations,
    upper_lower_marking,
    verify_complex,
)

DROP = AffineMap.drop_last(2)
CUBE = make_pm(0)


def _square_tri():
    return TriangulationComplex([(0, 0), (0, 1), (1, 0), (1, 1)], [(0, 1, 3), (0, 2, 3)])


def _cube_pi(diagonal="main", **kw):
    return build_pi_triangulation(DROP, CUBE, square_triangulation(diagonal), **kw)


def test_cube_prisms():
    for diagonal in ("main", "anti"):
        sub = fibered_subdivision(DROP, CUBE, square_triangulation(diagonal))
        assert len(sub.cells) == 2
        assert all(len(c.vertices) == 6 and c.normalized_volume == 3 for c in sub.cells)


@pytest.mark.parametrize("diagonal", ["main", "anti"])
def test_pm_preimages_are_not_lattice_polytopes(diagonal):
    # without the compatibility check, some cell over either diagonal gets a half-integral vertex
    with pytest.raises(ConstructionError, match="1/2|Fraction\\(1, 2\\)"):
        fibered_subdivision(DROP, make_pm(3), square_triangulation(diagonal), check=False)


@pytest.mark.parametrize("m", [1, 2, 5])
@pytest.mark.parametrize("diagonal", ["main", "anti"])
def test_pm_is_incompatible(m, diagonal):
    with pytest.raises(FaceCompatibilityError) as err:
        fibered_subdivision(DROP, make_pm(m), square_triangulation(diagonal))
    assert len(err.value.image) == 3
    with pytest.raises(FaceCompatibilityError):
        build_pi_triangulation(DROP, make_pm(m), square_triangulation(diagonal))


def test_cube_pi_triangulation():
    t = _cube_pi()
    assert len(t.simplices) == 6
    assert sorted(t.vertices) == sorted(CUBE.lattice_points())
    assert is_unimodular_triangulation(t) and is_flag(t)
    ok, heights = is_regular(t)
    assert ok and t.heights is not None
    assert verify_complex(t, CUBE)
    assert refines(t, fibered_subdivision(DROP, CUBE, square_triangulation("main")))


def test_segment_over_point():
    seg = LatticePolytope.from_points([(0,), (2,)])
    t = build_pi_triangulation(AffineMap.make([], [], 1), seg, point_triangulation())
    assert t.vertices == [(0,), (1,), (2,)]
    assert t.simplices == [(0, 1), (1, 2)]


@pytest.mark.parametrize("diagonal", ["main", "anti"])
def test_nakajima_over_square_count(diagonal):
    poly, f = make_nakajima(NakajimaSpec.from_forms(unit_square(), [0, 0, 0], [1, 1, 0]))
    t = build_pi_triangulation(f, poly, square_triangulation(diagonal))
    assert len(t.simplices) == poly.normalized_volume
    assert certify(t, poly, fibered_subdivision(f, poly, square_triangulation(diagonal))).ok


def test_unimodular_examples():
    assert is_unimodular_triangulation(_square_tri())
    assert not is_unimodular_triangulation(TriangulationComplex([(0, 0), (2, 1), (1, 2)], [(0, 1, 2)]))


def test_flag_examples():
    hollow = TriangulationComplex([(0, 0), (1, 0), (0, 1)], [(0, 1), (0, 2), (1, 2)])
    assert not is_flag(hollow)
    assert is_flag(TriangulationComplex([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)], [(0, 1, 2, 3)]))


def _polygon_triangulations(points):
    """All triangulations using every point, by brute force over triangle subsets."""
    poly = LatticePolytope.from_points(points)
    tris = [t for t in itertools.combinations(range(len(points)), 3)
            if (points[t[1]][0] - points[t[0]][0]) * (points[t[2]][1] - points[t[0]][1])
            != (points[t[1]][1] - points[t[0]][1]) * (points[t[2]][0] - points[t[0]][0])]
    out = []
    for r in range(1, len(tris) + 1):
        for combo in itertools.combinations(tris, r):
            used = {i for t in combo for i in t}
            if len(used) != len(points):
                continue
            t = TriangulationComplex(list(points), sorted(combo))
            if check_complex(t, poly).ok:
                out.append(t)
    return out


@pytest.mark.parametrize("points", [
    [(0, 0), (1, 0), (0, 1), (1, 1)],
    [(0, 0), (2, 0), (0, 2), (1, 1)],
    [(0, 0), (2, 0), (3, 2), (1, 3), (-1, 2)],
    [(0, 0), (3, 0), (0, 3), (1, 1)],
])
def test_small_polygons_are_regular(points):
    tris = _polygon_triangulations(points)
    assert tris
    for t in tris:
        assert is_regular(t)[0]


def test_single_simplex_zero_heights():
    ok, w = is_regular(TriangulationComplex([(0, 0), (1, 0), (0, 1)], [(0, 1, 2)]))
    assert ok and w == [0, 0, 0]


def test_twisted_triangulation_is_not_regular():
    big, small = [(0, 0), (6, 0), (3, 6)], [(2, 1), (4, 1), (3, 3)]
    v = big + small
    twisted = [(0, 1, 4), (1, 2, 5), (0, 2, 3), (0, 3, 4), (1, 4, 5), (2, 3, 5), (3, 4, 5)]
    t = TriangulationComplex(v, sorted(tuple(sorted(s)) for s in twisted))
    assert verify_complex(t, LatticePolytope.from_points(v))
    ok, refutation = is_regular(t)
    assert not ok
    assert all(c >= 0 for c in refutation) and sum(refutation) == 1


def test_heights_satisfy_global_condition():
    t = _cube_pi()
    w = t.heights
    from segfib.lattice import inverse

    for s in t.simplices:
        pts = t.simplex_points(s)
        inv = inverse([[Fraction(p[i]) for p in pts] for i in range(3)] + [[1] * 4])
        for v, x in enumerate(t.vertices):
            if v in s:
                continue
            lam = [sum(a * b for a, b in zip(row, list(x) + [1])) for row in inv]
            assert sum(c * w[i] for c, i in zip(lam, s)) <= w[v] - 1


def test_verify_complex_examples():
    sq = LatticePolytope.from_points([(0, 0), (1, 0), (0, 1), (1, 1)])
    assert verify_complex(_square_tri(), sq)
    overlapping = TriangulationComplex([(0, 0), (0, 1), (1, 0), (1, 1)], [(0, 1, 2), (0, 1, 3), (0, 2, 3)])
    assert not verify_complex(overlapping, sq)
    # equal total volume but improperly overlapping
    crossed = TriangulationComplex([(0, 0), (0, 1), (1, 0), (1, 1)], [(0, 1, 3), (0, 1, 2)])
    rep = check_complex(crossed, sq)
    assert not rep.ok and "common face" in rep.reason
    outside = TriangulationComplex([(0, 0), (2, 0), (0, 2)], [(0, 1, 2)])
    assert not verify_complex(outside, sq)


def test_refines_examples():
    prisms = fibered_subdivision(DROP, CUBE, square_triangulation("main"))
    assert refines(_cube_pi("main"), prisms)
    assert not refines(_cube_pi("anti"), prisms)
    assert refines(_cube_pi("anti"), [CUBE])


def test_random_orders_respect_fibers():
    rng = random.Random(4)
    pts = [(0, 1), (0, 2), (0, 3), (1, 1), (1, 2)]
    for _ in range(20):
        seq = random_enumeration(pts, rng)
        assert sorted(seq) == sorted(pts)
        assert [y for y in seq if y[0] == 0] == [(0, 1), (0, 2), (0, 3)]


def test_orders_give_valid_triangulations():
    levels = make_nakajima_tower([([0], [2]), ([0, 0], [1, 1]), ([0, 0, 0], [1, 1, 1])])
    poly, f = levels[-1]
    base = tower_triangulations(levels[:-1])[-1]
    sub = fibered_subdivision(f, poly, base)
    for seed in range(5):
        t = build_pi_triangulation(f, poly, base, order="random", rng=random.Random(seed))
        assert certify(t, poly, sub).ok


def test_bad_explicit_order_rejected():
    with pytest.raises(ValueError):
        _cube_pi(order=[(1, 1, 1), (0, 0, 1), (0, 1, 1), (1, 0, 1)][:2])


def test_sheared_fibration_normal_form():
    # a unimodular image of the cube with the fibration pulled back along the shear
    u = [[1, 0, 0], [1, 1, 0], [2, 1, 1]]
    u_inv = [[1, 0, 0], [-1, 1, 0], [-1, -1, 1]]
    pts = [tuple(sum(a * x for a, x in zip(row, v)) for row in u) for v in CUBE.vertices]
    poly = LatticePolytope.from_points(pts)
    f = AffineMap.make(u_inv[:2], [0, 0])
    t = build_pi_triangulation(f, poly, square_triangulation("main"))
    assert certify(t, poly, fibered_subdivision(f, poly, square_triangulation("main"))).ok


def test_marking():
    mark = upper_lower_marking(DROP, make_pm(5))
    assert sum(p.upper for p in mark.points) == 4
    assert sum(p.lower for p in mark.points) == 4
    assert not any(p.upper and p.lower for p in mark.points)


def test_base_must_use_every_fiber():
    rect = LatticePolytope.from_points([(0, 0), (2, 0), (0, 1), (2, 1)])
    with pytest.raises(ConstructionError):
        build_pi_triangulation(AffineMap.make([[1, 0]], [0]), rect, TriangulationComplex([(0,), (2,)], [(0, 1)]))


def test_json_round_trip():
    t = _cube_pi()
    again = TriangulationComplex.from_json(t.to_json())
    assert again == t
