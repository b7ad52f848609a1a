from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import cone_points_upto, is_irreducible, monoid_closure
from segfib.cones import NotPointedError, cone_facets, decompose, hilbert_basis, parallelepiped_points
from segfib.lattice import det


def test_unimodular_cone():
    assert hilbert_basis([(1, 0), (0, 1)]).generators == ((0, 1), (1, 0))


def test_cone_with_one_extra_element():
    assert hilbert_basis([(1, 0), (1, 2)]).generators == ((1, 0), (1, 1), (1, 2))


def test_pm_vertex_cone_monoid():
    # the four listed generators generate the cone's lattice points; (1,1,m) is itself decomposable
    m = 5
    gens = [(1, 0, 0), (0, 1, 0), (1, 1, m), (0, 0, 1)]
    hb = hilbert_basis(gens)
    assert hb.generators == ((0, 0, 1), (0, 1, 0), (1, 0, 0))
    for g in gens:
        assert decompose(g, gens, hb.facets) is not None
    for h in hb.generators:
        assert decompose(h, gens, hb.facets) is not None


def test_non_pointed_rejected():
    with pytest.raises(NotPointedError):
        hilbert_basis([(1, 0), (-1, 0), (0, 1)])
    with pytest.raises(ValueError):
        hilbert_basis([(1, 0, 0), (0, 1, 0)])


def test_parallelepiped_counts_match_determinant():
    for gens in ([(1, 0), (1, 3)], [(2, 1), (1, 2)], [(1, 0, 0), (0, 1, 0), (1, 1, 4)]):
        pts = parallelepiped_points(gens)
        assert len(pts) == abs(det(gens))
        assert len(set(pts)) == len(pts)


def test_decompose_reports_failure():
    facets = cone_facets([(1, 0), (1, 2)])
    assert decompose((1, 1), [(1, 0), (1, 2)], facets) is None
    assert sorted(decompose((2, 2), [(1, 0), (1, 2)], facets)) == [(1, 0), (1, 2)]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 3))
def test_against_brute_force(seed, d):
    rng = random.Random(seed)
    while True:
        gens = [tuple(rng.randint(0, 4) for _ in range(d)) for _ in range(rng.randint(d, d + 2))]
        try:
            hb = hilbert_basis(gens)
            break
        except ValueError:
            continue
    bound = 8 if d == 3 else 12
    pts = cone_points_upto(gens, bound)
    assert monoid_closure(pts, hb.generators) == set(pts)
    for h in hb.generators:
        assert is_irreducible(h, gens)
