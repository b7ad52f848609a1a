"""Unimodular triangulations of segmentally fibered polytopes and their certificates.

The construction lifts a unimodular triangulation of the base Q to P one
lattice point at a time.  Points are processed fiber by fiber from the bottom
up; each new point y is coned over the part of the current upper boundary
that lies directly below it.  The resulting complex is then checked
independently: unimodularity, flagness, regularity (exact LP), tiling, and
refinement of the fibered subdivision.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import networkx as nx

from .families import AffineMap
from .lattice import IntPoint, det, dot, integer_kernel, inverse, primitive, xgcd
from .lp import phase_one, strictly_feasible
from .monoid import is_unimodular_simplex
from .polytope import (
    Facet,
    HRepresentation,
    LatticePolytope,
    affine_chart,
    chart_coordinates,
    convex_hull,
    polytope_vertices,
    relative_volume,
    simplex_volume_in_chart,
)


class FaceCompatibilityError(ValueError):
    """The image of a face of P is not a union of faces of the base triangulation."""

    def __init__(self, face: Sequence[IntPoint], image: Sequence[IntPoint]):
        self.face = [tuple(v) for v in face]
        self.image = [tuple(v) for v in image]
        super().__init__(f"face {self.face} has image {self.image}, which is not a union of base faces")


class ConstructionError(RuntimeError):
    pass


@dataclass
class TriangulationComplex:
    """Simplices are sorted index tuples into ``vertices``."""

    vertices: list[IntPoint]
    simplices: list[tuple[int, ...]]
    heights: list[Fraction] | None = None

    def simplex_points(self, s: Sequence[int]) -> list[IntPoint]:
        return [self.vertices[i] for i in s]

    @property
    def dim(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    def to_json(self) -> dict:
        out = {"vertices": [list(v) for v in self.vertices],
               "simplices": [list(s) for s in self.simplices]}
        if self.heights is not None:
            out["heights"] = [str(h) for h in self.heights]
        return out

    @classmethod
    def from_json(cls, data: dict) -> "TriangulationComplex":
        heights = data.get("heights")
        return cls([tuple(int(c) for c in v) for v in data["vertices"]],
                   [tuple(sorted(int(i) for i in s)) for s in data["simplices"]],
                   [Fraction(h) for h in heights] if heights is not None else None)


@dataclass
class PolytopalComplex:
    cells: list[tuple[tuple[int, ...], list[IntPoint]]]
    vertex_pool: list[IntPoint]


@dataclass
class FiberedSubdivision:
    """Cells f^-1(delta) of P for the maximal simplices delta of the base triangulation."""

    base_triangulation: TriangulationComplex
    cells: list[LatticePolytope]

    def as_complex(self) -> PolytopalComplex:
        pool = sorted({v for c in self.cells for v in c.vertices})
        index = {v: i for i, v in enumerate(pool)}
        return PolytopalComplex([(tuple(index[v] for v in c.vertices), list(c.vertices)) for c in self.cells], pool)


@dataclass(frozen=True)
class MarkedPoint:
    point: IntPoint
    base: IntPoint
    height: int
    upper: bool
    lower: bool


@dataclass
class UpperLowerMarking:
    points: list[MarkedPoint] = field(default_factory=list)


# base triangulations -------------------------------------------------------

def square_triangulation(diagonal: str = "main") -> TriangulationComplex:
    """Unit square split along (0,0)-(1,1) ("main") or (1,0)-(0,1) ("anti")."""
    verts = [(0, 0), (0, 1), (1, 0), (1, 1)]
    if diagonal == "main":
        simp = [(0, 1, 3), (0, 2, 3)]
    elif diagonal == "anti":
        simp = [(0, 1, 2), (1, 2, 3)]
    else:
        raise ValueError(f"unknown diagonal {diagonal!r}")
    return TriangulationComplex(verts, simp)


def point_triangulation() -> TriangulationComplex:
    return TriangulationComplex([()], [(0,)])


# normal form -----------------------------------------------------------------

@dataclass(frozen=True)
class _NormalForm:
    """x -> (f(x), height(x)) as an integer unimodular change of coordinates."""

    matrix: tuple[tuple[int, ...], ...]
    offset: IntPoint
    inv: tuple[tuple[int, ...], ...]

    def forward(self, x: Sequence[int]) -> IntPoint:
        return tuple(dot(r, x) + c for r, c in zip(self.matrix, self.offset))

    def backward(self, y: Sequence[int]) -> IntPoint:
        z = [a - c for a, c in zip(y, self.offset)]
        return tuple(dot(r, z) for r in self.inv)


def _normal_form(f: AffineMap) -> _NormalForm:
    n = f.source_dim
    if f.target_dim != n - 1:
        raise ValueError("fibration must drop exactly one dimension")
    if f.target_dim == 0:
        return _NormalForm(((1,),), (0,), ((1,),))
    ker = integer_kernel(f.matrix)
    if len(ker) != 1:
        raise ValueError("fibration kernel is not one-dimensional")
    k = primitive(ker[0])
    # integer l with l . k = 1, built by folding extended gcds
    l = [0] * n
    g = 0
    for i, c in enumerate(k):
        if c == 0:
            continue
        if g == 0:
            g, l[i] = abs(c), (1 if c > 0 else -1)
            continue
        g2, x, y = xgcd(g, c)
        l = [x * v for v in l]
        l[i] = y
        g = g2
    if g != 1 or dot(l, k) != 1:
        raise ValueError("kernel direction is not primitive")
    mat = tuple(f.matrix) + (tuple(l),)
    d = det(mat)
    if abs(d) != 1:
        raise ValueError("fibration does not split the lattice (determinant %d)" % d)
    inv = inverse(mat)
    return _NormalForm(mat, tuple(f.offset) + (0,), tuple(tuple(int(c) for c in r) for r in inv))


# face compatibility ------------------------------------------------------------

def _local_hull(points, origin, basis):
    local = [chart_coordinates(origin, basis, p) for p in points]
    den = math.lcm(1, *(c.denominator for v in local for c in v))
    ints = sorted(set(tuple(int(c * den) for c in v) for v in local))
    _, h = convex_hull(ints)
    return den, h


def _base_faces(delta: TriangulationComplex, e: int) -> set[tuple[int, ...]]:
    return {c for s in delta.simplices for c in itertools.combinations(s, e + 1)}


def check_face_compatibility(f: AffineMap, p: LatticePolytope, delta_q: TriangulationComplex) -> None:
    """Raise FaceCompatibilityError for the first face F with f(F) not a union of faces of delta_q.

    f(F) is convex; the e-dimensional faces of delta_q inside it have disjoint
    relative interiors, so they cover f(F) exactly when their e-volumes add up
    to the e-volume of f(F).
    """
    faces_by_dim: dict[int, set] = {}
    for face in p.faces():
        image = sorted(set(f(v) for v in face))
        origin, basis = affine_chart(image)
        e = len(basis)
        if e not in faces_by_dim:
            faces_by_dim[e] = _base_faces(delta_q, e)
        if e == 0:
            if image[0] not in delta_q.vertices:
                raise FaceCompatibilityError(face, image)
            continue
        den, h = _local_hull(image, origin, basis)
        target = relative_volume(image, origin, basis)
        covered = Fraction(0)
        for s in faces_by_dim[e]:
            pts = delta_q.simplex_points(s)
            local = [chart_coordinates(origin, basis, x) for x in pts]
            if any(z is None for z in local):
                continue
            if all(h.contains(tuple(c * den for c in z)) for z in local):
                covered += simplex_volume_in_chart(pts, origin, basis)
        if covered != target:
            raise FaceCompatibilityError(face, image)


# fibered subdivision -------------------------------------------------------------

def _preimage_cell(f: AffineMap, p: LatticePolytope, simplex: list[IntPoint]) -> LatticePolytope:
    """P intersected with f^-1(conv(simplex)), for a full-dimensional base simplex."""
    facets = list(p.facets)
    if f.target_dim:
        _, hs = convex_hull(simplex)
        for fa in hs.facets:
            # fa.normal . (M x + c) >= offset
            normal = tuple(sum(a * f.matrix[i][j] for i, a in enumerate(fa.normal)) for j in range(f.source_dim))
            facets.append(Facet(normal, fa.offset - dot(fa.normal, f.offset)))
    verts = polytope_vertices(HRepresentation(tuple(facets), f.source_dim))
    if any(not isinstance(c, int) for v in verts for c in v):
        raise ConstructionError(f"preimage of {simplex} has non-lattice vertices {verts}")
    return LatticePolytope.from_points(verts)


def fibered_subdivision(f: AffineMap, p: LatticePolytope, delta_q: TriangulationComplex,
                        check: bool = True) -> FiberedSubdivision:
    """Cells f^-1(delta) of P; with ``check`` the face-compatibility hypothesis is verified first."""
    if check:
        check_face_compatibility(f, p, delta_q)
    cells = [_preimage_cell(f, p, delta_q.simplex_points(s)) for s in delta_q.simplices]
    if sum(c.normalized_volume for c in cells) != p.normalized_volume:
        raise ConstructionError("fibered cells do not tile P")
    return FiberedSubdivision(delta_q, cells)


def upper_lower_marking(f: AffineMap, p: LatticePolytope) -> UpperLowerMarking:
    nf = _normal_form(f)
    pts = [nf.forward(y) for y in p.lattice_points()]
    lo: dict[IntPoint, int] = {}
    hi: dict[IntPoint, int] = {}
    for y in pts:
        x, t = y[:-1], y[-1]
        lo[x] = min(lo.get(x, t), t)
        hi[x] = max(hi.get(x, t), t)
    out = UpperLowerMarking()
    for y, orig in sorted(zip(pts, p.lattice_points())):
        x, t = y[:-1], y[-1]
        out.points.append(MarkedPoint(orig, x, t, t == hi[x], t == lo[x]))
    return out


# the lifting construction ------------------------------------------------------------

def default_enumeration(points: Sequence[IntPoint]) -> list[IntPoint]:
    """Non-minimal fiber points ordered by (base, height)."""
    return sorted(points)


def random_enumeration(points: Sequence[IntPoint], rng: random.Random) -> list[IntPoint]:
    """Uniformly random interleaving of the fibers, each fiber kept bottom-up."""
    fibers: dict[IntPoint, list[IntPoint]] = {}
    for y in sorted(points):
        fibers.setdefault(y[:-1], []).append(y)
    queues = [list(reversed(v)) for _, v in sorted(fibers.items())]
    out = []
    while queues:
        weights = [len(q) for q in queues]
        i = rng.choices(range(len(queues)), weights=weights)[0]
        out.append(queues[i].pop())
        if not queues[i]:
            queues.pop(i)
    return out


def _valid_order(order: Sequence[IntPoint]) -> bool:
    last: dict[IntPoint, int] = {}
    for y in order:
        x, t = y[:-1], y[-1]
        if x in last and last[x] >= t:
            return False
        last[x] = t
    return True


def build_pi_triangulation(f: AffineMap, p: LatticePolytope, delta_q: TriangulationComplex,
                           order: str | Sequence[IntPoint] = "default", rng: random.Random | None = None,
                           certify: bool = True) -> TriangulationComplex:
    """Lift delta_q to a unimodular triangulation of P.

    ``order`` is "default", "random" (uses ``rng``), or an explicit list of the
    non-minimal lattice points in normal-form coordinates.  With ``certify``
    the regularity heights found by LP are attached to the result.
    """
    check_face_compatibility(f, p, delta_q)
    nf = _normal_form(f)
    pts = [nf.forward(y) for y in p.lattice_points()]
    base_index = {v: i for i, v in enumerate(delta_q.vertices)}
    top: dict[IntPoint, int] = {}
    for y in pts:
        x, t = y[:-1], y[-1]
        if x not in base_index:
            raise ConstructionError(f"fiber base {x} is not a vertex of the base triangulation")
        top[x] = min(top.get(x, t), t)
    upper = [y for y in pts if y[-1] > top[y[:-1]]]
    if isinstance(order, str):
        if order == "default":
            seq = default_enumeration(upper)
        elif order == "random":
            seq = random_enumeration(upper, rng or random.Random(0))
        else:
            raise ValueError(f"unknown order {order!r}")
    else:
        seq = [tuple(y) for y in order]
        if sorted(seq) != sorted(upper) or not _valid_order(seq):
            raise ValueError("order must list every non-minimal point, bottom-up within each fiber")
    star: dict[IntPoint, list[tuple[IntPoint, ...]]] = {}
    for s in delta_q.simplices:
        bs = tuple(delta_q.vertices[i] for i in s)
        for v in bs:
            star.setdefault(v, []).append(bs)
    cells: list[tuple[IntPoint, ...]] = []
    for y in seq:
        x, h = y[:-1], y[-1]
        if top[x] != h - 1:
            raise ConstructionError(f"point {y} is not directly above the upper boundary (top {top[x]})")
        for bs in star[x]:
            cells.append(tuple(sorted([v + (top[v],) for v in bs] + [y])))
        top[x] = h
    originals = sorted(p.lattice_points())
    index = {v: i for i, v in enumerate(originals)}
    simplices = sorted(tuple(sorted(index[nf.backward(v)] for v in c)) for c in cells)
    t = TriangulationComplex(originals, simplices)
    if certify:
        ok, cert = is_regular(t)
        if not ok:
            raise ConstructionError(f"constructed triangulation failed the regularity LP: {cert}")
        t.heights = cert
    return t


# certificates -----------------------------------------------------------------------

def is_unimodular_triangulation(t: TriangulationComplex) -> bool:
    d = t.dim
    if any(len(s) != d + 1 for s in t.simplices):
        return False
    return all(is_unimodular_simplex(t.simplex_points(s)) for s in t.simplices)


def minimal_nonfaces_beyond_edges(t: TriangulationComplex) -> list[tuple[int, ...]]:
    """Maximal cliques of the edge graph not spanned by a simplex (empty iff flag)."""
    g = nx.Graph()
    g.add_nodes_from(sorted({i for s in t.simplices for i in s}))
    for s in t.simplices:
        g.add_edges_from(itertools.combinations(s, 2))
    cells = [frozenset(s) for s in t.simplices]
    bad = []
    for clique in nx.find_cliques(g):
        c = frozenset(clique)
        if not any(c <= s for s in cells):
            bad.append(tuple(sorted(c)))
    return sorted(bad)


def is_flag(t: TriangulationComplex) -> bool:
    return not minimal_nonfaces_beyond_edges(t)


class _Barycentric:
    """Affine coordinates for a full-dimensional simplex, scaled to integers by ``den``."""

    __slots__ = ("rows", "den")

    def __init__(self, simplex: Sequence[IntPoint]):
        n = len(simplex[0])
        inv = inverse([[v[i] for v in simplex] for i in range(n)] + [[1] * len(simplex)])
        self.den = math.lcm(*(c.denominator for r in inv for c in r))
        self.rows = [[int(c * self.den) for c in r] for r in inv]

    def scaled(self, x: Sequence[int]) -> list[int]:
        return [sum(a * b for a, b in zip(r, x)) + r[-1] for r in self.rows]


def _charts(t: TriangulationComplex) -> list[_Barycentric]:
    return [_Barycentric(t.simplex_points(s)) for s in t.simplices]


def _fold_row(n_vertices: int, simplex: Sequence[int], chart: _Barycentric, x: Sequence[int], v: int) -> list[int]:
    """Coefficients of w(v) - (affine extension of w over simplex)(x), times a positive integer."""
    row = [0] * n_vertices
    row[v] += chart.den
    for i, c in zip(simplex, chart.scaled(x)):
        row[i] -= c
    g = math.gcd(*row)
    return [c // g for c in row] if g > 1 else row


def _regular_constraints(t: TriangulationComplex, charts: list[_Barycentric], full: bool) -> list[list[int]]:
    n = len(t.vertices)
    rows = []
    if full:
        for s, ch in zip(t.simplices, charts):
            for v in range(n):
                if v not in s:
                    rows.append(_fold_row(n, s, ch, t.vertices[v], v))
        return rows
    ridges: dict[tuple[int, ...], list[int]] = {}
    for k, s in enumerate(t.simplices):
        for r in itertools.combinations(s, len(s) - 1):
            ridges.setdefault(r, []).append(k)
    for r, ks in ridges.items():
        if len(ks) == 2:
            k1, k2 = ks
            (b,) = set(t.simplices[k2]) - set(r)
            rows.append(_fold_row(n, t.simplices[k1], charts[k1], t.vertices[b], b))
    used = {i for s in t.simplices for i in s}
    for v in range(n):
        if v in used:
            continue
        for s, ch in zip(t.simplices, charts):
            if all(c >= 0 for c in ch.scaled(t.vertices[v])):
                rows.append(_fold_row(n, s, ch, t.vertices[v], v))
                break
    return rows


def _global_margin(t: TriangulationComplex, charts: list[_Barycentric], w: Sequence[Fraction]) -> Fraction | None:
    worst = None
    for s, ch in zip(t.simplices, charts):
        for v, x in enumerate(t.vertices):
            if v in s:
                continue
            m = (ch.den * w[v] - sum(c * w[i] for c, i in zip(ch.scaled(x), s))) / ch.den
            if worst is None or m < worst:
                worst = m
    return worst


def is_regular(t: TriangulationComplex):
    """Exact regularity test for a full-dimensional triangulation.

    Returns (True, heights) with w(v) >= (affine extension of w over sigma)(v) + 1
    for every maximal simplex sigma and vertex v outside it, or (False, y)
    where y is a nonnegative combination of constraints summing to zero.
    Local folding conditions across interior ridges are solved first; the
    result is verified against the full condition, falling back to the full
    constraint set if needed.
    """
    n = len(t.vertices)
    if len(t.simplices) == 1 and n == len(t.simplices[0]):
        return True, [Fraction(0)] * n
    charts = _charts(t)
    for full in (False, True):
        rows = _regular_constraints(t, charts, full)
        if not rows:
            w = [Fraction(0)] * n
        else:
            w, refutation = strictly_feasible(rows)
            if w is None:
                return False, refutation
        margin = _global_margin(t, charts, w)
        if margin is None or margin >= 1:
            return True, list(w)
        if margin > 0:
            return True, [c / margin for c in w]
    raise ArithmeticError("full constraint set feasible but global check failed")


def _bbox(pts):
    return [min(c) for c in zip(*pts)], [max(c) for c in zip(*pts)]


def _boxes_meet(a, b) -> bool:
    return all(lo1 <= hi2 and lo2 <= hi1 for lo1, hi1, lo2, hi2 in zip(a[0], a[1], b[0], b[1]))


def _improper_pair(s: Sequence[IntPoint], t: Sequence[IntPoint]) -> bool:
    """True iff conv(s) and conv(t) meet outside conv(s and t's common vertices).

    Feasibility of: lam, mu >= 0, sum lam_i s_i = sum mu_j t_j, sum lam = sum mu,
    and the weight of lam on the vertices of s not in t equal to 1.
    """
    shared = set(s) & set(t)
    own = [i for i, v in enumerate(s) if v not in shared]
    if not own:
        return False
    n = len(s[0])
    ns, nt = len(s), len(t)
    a_eq = []
    for c in range(n):
        a_eq.append([v[c] for v in s] + [-v[c] for v in t])
    a_eq.append([1] * ns + [-1] * nt)
    a_eq.append([int(i in own) for i in range(ns)] + [0] * nt)
    b_eq = [0] * (n + 1) + [1]
    x, _ = phase_one(a_eq, b_eq)
    return x is not None


def _separated(chart: _Barycentric, own: set, other: Sequence[IntPoint]) -> bool:
    """Some facet hyperplane of the first simplex has ``other`` weakly outside, touching only shared vertices.

    Then the intersection lies in that hyperplane and equals the hull of the
    shared vertices, so the pair meets properly.
    """
    lams = [chart.scaled(x) for x in other]
    for i in range(len(chart.rows)):
        if all(l[i] <= 0 for l in lams) and all(x in own for x, l in zip(other, lams) if l[i] == 0):
            return True
    return False


def first_improper_pair(t: TriangulationComplex) -> tuple[int, int] | None:
    pts = [t.simplex_points(s) for s in t.simplices]
    boxes = [_bbox(p) for p in pts]
    charts = _charts(t)
    sets = [set(p) for p in pts]
    for i, j in itertools.combinations(range(len(pts)), 2):
        if not _boxes_meet(boxes[i], boxes[j]):
            continue
        if _separated(charts[i], sets[i], pts[j]) or _separated(charts[j], sets[j], pts[i]):
            continue
        if _improper_pair(pts[i], pts[j]):
            return i, j
    return None


@dataclass
class ComplexReport:
    ok: bool
    reason: str | None = None


def check_complex(t: TriangulationComplex, p: LatticePolytope) -> ComplexReport:
    for k, s in enumerate(t.simplices):
        for v in t.simplex_points(s):
            if not p.contains(v):
                return ComplexReport(False, f"simplex {k} has vertex {v} outside P")
    total = sum(abs(det([[a - b for a, b in zip(v, pts[0])] for v in pts[1:]]))
                for pts in (t.simplex_points(s) for s in t.simplices))
    if total != p.normalized_volume:
        return ComplexReport(False, f"simplex volumes sum to {total}, P has {p.normalized_volume}")
    pair = first_improper_pair(t)
    if pair is not None:
        return ComplexReport(False, f"simplices {pair[0]} and {pair[1]} do not meet in a common face")
    return ComplexReport(True)


def verify_complex(t: TriangulationComplex, p: LatticePolytope) -> bool:
    return check_complex(t, p).ok


def refines(t: TriangulationComplex, r: FiberedSubdivision | Sequence[LatticePolytope]) -> bool:
    cells = r.cells if isinstance(r, FiberedSubdivision) else list(r)
    for s in t.simplices:
        pts = t.simplex_points(s)
        if not any(all(c.contains(v) for v in pts) for c in cells):
            return False
    return True


@dataclass
class CertificateReport:
    unimodular: bool
    flag: bool
    regular: bool
    complex: bool
    refines: bool
    diagnostics: list[str] = field(default_factory=list)
    heights: list[Fraction] | None = None

    @property
    def ok(self) -> bool:
        return self.unimodular and self.flag and self.regular and self.complex and self.refines

    def to_json(self) -> dict:
        return {"unimodular": self.unimodular, "flag": self.flag, "regular": self.regular,
                "verify_complex": self.complex, "refines": self.refines, "diagnostics": self.diagnostics}


def certify(t: TriangulationComplex, p: LatticePolytope, subdivision: FiberedSubdivision | None = None) -> CertificateReport:
    diag = []
    uni = is_unimodular_triangulation(t)
    if not uni:
        bad = next(k for k, s in enumerate(t.simplices)
                   if len(s) != t.dim + 1 or not is_unimodular_simplex(t.simplex_points(s)))
        diag.append(f"simplex {bad} is not unimodular")
    nonfaces = minimal_nonfaces_beyond_edges(t)
    if nonfaces:
        diag.append(f"minimal non-face {nonfaces[0]}")
    reg, cert = is_regular(t)
    if not reg:
        diag.append("regularity LP infeasible")
    cx = check_complex(t, p)
    if not cx.ok:
        diag.append(cx.reason)
    ref = True if subdivision is None else refines(t, subdivision)
    if not ref:
        diag.append("a simplex is not contained in any fibered cell")
    return CertificateReport(uni, not nonfaces, reg, cx.ok, ref, diag, cert if reg else None)


def tower_triangulations(levels: Sequence[tuple[LatticePolytope, AffineMap]], **kwargs) -> list[TriangulationComplex]:
    """Triangulate every level of an iterated construction, each over the previous one."""
    base = point_triangulation()
    out = []
    for poly, f in levels:
        base = build_pi_triangulation(f, poly, base, **kwargs)
        out.append(base)
    return out


__all__ = [
    "ConstructionError",
    "FaceCompatibilityError",
    "FiberedSubdivision",
    "PolytopalComplex",
    "TriangulationComplex",
    "UpperLowerMarking",
    "build_pi_triangulation",
    "certify",
    "check_complex",
    "check_face_compatibility",
    "fibered_subdivision",
    "is_flag",
    "is_regular",
    "is_unimodular_triangulation",
    "point_triangulation",
    "random_enumeration",
    "refines",
    "square_triangulation",
    "tower_triangulations",
    "upper_lower_marking",
    "verify_complex",
]
