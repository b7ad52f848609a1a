"""Reference computations that share no code with the package.

Floating-point Qhull and sympy's rational and integer routines serve as the
second route for every exact quantity the tests freeze.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb, factorial

import numpy as np
import sympy
from scipy.spatial import ConvexHull
from sympy.matrices.normalforms import smith_normal_form

TOL = 1e-9


def qhull_lattice_points(vertices, k: int = 1) -> list[tuple[int, ...]]:
    """Lattice points of k * conv(vertices) by bounding-box scan against Qhull facets."""
    pts = np.array(vertices, dtype=float) * k
    d = pts.shape[1]
    lo = np.floor(pts.min(axis=0)).astype(int)
    hi = np.ceil(pts.max(axis=0)).astype(int)
    if d == 1:
        return [(x,) for x in range(lo[0], hi[0] + 1)]
    eq = ConvexHull(pts).equations
    out = []
    for x in itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi))):
        if np.all(eq[:, :-1] @ np.array(x, dtype=float) + eq[:, -1] <= TOL):
            out.append(tuple(int(c) for c in x))
    return sorted(out)


def qhull_normalized_volume(vertices) -> int:
    pts = np.array(vertices, dtype=float)
    d = pts.shape[1]
    return int(round(ConvexHull(pts).volume * factorial(d)))


def qhull_vertices(points) -> list[tuple[int, ...]]:
    h = ConvexHull(np.array(points, dtype=float))
    return sorted(tuple(int(c) for c in points[i]) for i in h.vertices)


def sympy_elementary_divisors(rows) -> list[int]:
    m = sympy.Matrix(rows)
    s = smith_normal_form(m, domain=sympy.ZZ)
    return [abs(int(s[i, i])) for i in range(min(s.shape)) if s[i, i] != 0]


def sympy_row_lattice_index(rows) -> int:
    """|det| of a square full-rank integer matrix, via sympy."""
    return abs(int(sympy.Matrix(rows).det()))


def pm_gap_formula(m: int) -> list[int]:
    return [comb(k + 1, 3) * (m - k - 1) for k in range(1, m - 1)]


def pm_ehrhart_formula(m: int) -> tuple[Fraction, ...]:
    """Ascending coefficients of (m/6+1)j^3 + 3j^2 + (3-m/6)j + 1."""
    return (Fraction(1), 3 - Fraction(m, 6), Fraction(3), Fraction(m, 6) + 1)


def pm_generated_count(j: int) -> int:
    return (j + 1) * comb(j + 3, 3)


def in_cone_caratheodory(x, gens) -> bool:
    """Exact cone membership: x lies in some simplicial subcone spanned by independent generators."""
    n = len(x)
    xv = sympy.Matrix(x)
    for sub in itertools.combinations(gens, n):
        g = sympy.Matrix(sub).T
        if g.det() == 0:
            continue
        lam = g.LUsolve(xv)
        if all(c >= 0 for c in lam):
            return True
    return False


def cone_points_upto(gens, max_sum: int) -> list[tuple[int, ...]]:
    """Lattice points of the cone (generators in the nonnegative orthant) with coordinate sum <= max_sum."""
    n = len(gens[0])
    out = []
    for x in itertools.product(range(max_sum + 1), repeat=n):
        if sum(x) <= max_sum and in_cone_caratheodory(x, gens):
            out.append(x)
    return out


def monoid_closure(targets, gens) -> set[tuple[int, ...]]:
    """The subset of targets (closed under going down in the orthant) reachable as sums of gens."""
    tset = set(targets)
    reach = {tuple(0 for _ in targets[0])}
    for x in sorted(targets, key=sum):
        if x in reach:
            continue
        for g in gens:
            y = tuple(a - b for a, b in zip(x, g))
            if y in reach:
                reach.add(x)
                break
    return reach & tset


def is_irreducible(h, gens) -> bool:
    """h is not a sum of two nonzero cone points (orthant cones only)."""
    for y in itertools.product(*(range(c + 1) for c in h)):
        z = tuple(a - b for a, b in zip(h, y))
        if any(y) and any(z) and in_cone_caratheodory(y, gens) and in_cone_caratheodory(z, gens):
            return False
    return True


def brute_minkowski_slices(points, k_max: int) -> list[set]:
    """All sums of k points of A, by multiset combinations (independent of iterated sums)."""
    out = []
    for k in range(k_max + 1):
        s = set()
        for combo in itertools.combinations_with_replacement(points, k):
            s.add(tuple(sum(c) for c in zip(*combo)) if combo else tuple(0 for _ in points[0]))
        out.append(s)
    return out


def cone_points_by_subcones(gens, max_sum: int) -> list[tuple[int, ...]]:
    """Same set as cone_points_upto, with each simplicial subcone inverted once by sympy."""
    n = len(gens[0])
    invs = []
    for sub in itertools.combinations(gens, n):
        g = sympy.Matrix(sub).T
        if g.det() != 0:
            inv = g.inv()
            invs.append([[Fraction(int(inv[i, j].p), int(inv[i, j].q)) for j in range(n)] for i in range(n)])
    out = []
    for x in itertools.product(range(max_sum + 1), repeat=n):
        if sum(x) <= max_sum and any(all(sum(a * b for a, b in zip(row, x)) >= 0 for row in inv) for inv in invs):
            out.append(x)
    return out


def canonical_cones(d: int, entry_max: int) -> list[tuple[tuple[int, ...], ...]]:
    """Simplicial full-rank cones with generator entries in [0, entry_max], one per
    primitive generator set up to coordinate permutation."""
    from math import gcd

    def prim(v):
        g = 0
        for c in v:
            g = gcd(g, c)
        return tuple(c // g for c in v)

    vecs = sorted({prim(v) for v in itertools.product(range(entry_max + 1), repeat=d) if any(v)})
    seen = set()
    out = []
    for sub in itertools.combinations(vecs, d):
        if sympy.Matrix(sub).det() == 0:
            continue
        key = min(tuple(sorted(tuple(v[i] for i in p) for v in sub)) for p in itertools.permutations(range(d)))
        if key not in seen:
            seen.add(key)
            out.append(key)
    return out
