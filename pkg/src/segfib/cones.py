"""Rational cones: facets, gradings, Hilbert bases, monoid membership."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .lattice import IntPoint, det, dot, inverse, primitive, rank, smith, sub
from .polytope import extreme_rays, pulling_triangulation


class NotPointedError(ValueError):
    pass


def cone_facets(generators: Sequence[Sequence[int]]) -> list[IntPoint]:
    """Primitive inward facet normals of a full-dimensional pointed cone."""
    gens = [tuple(g) for g in generators if any(g)]
    if not gens:
        raise ValueError("no nonzero generators")
    n = len(gens[0])
    if rank(gens) < n:
        raise ValueError("cone is not full-dimensional")
    normals = sorted(r for r, _ in extreme_rays(gens, n))
    if rank(normals) < n:
        raise NotPointedError("cone contains a line")
    return normals


def grading(normals: Sequence[Sequence[int]]) -> IntPoint:
    """Sum of facet normals: an integer functional that is >= 1 on nonzero cone lattice points."""
    n = len(normals[0])
    return tuple(sum(v[i] for v in normals) for i in range(n))


def parallelepiped_points(gens: Sequence[Sequence[int]]) -> list[IntPoint]:
    """Lattice points of the half-open parallelepiped sum [0,1) * g_i (square, full rank)."""
    n = len(gens)
    g_cols = [list(col) for col in zip(*gens)]  # columns are generators
    diag, u, _ = smith(g_cols)
    u_inv = inverse(u)
    g_inv = inverse(g_cols)
    reps = [()]
    for s in diag:
        reps = [r + (k,) for r in reps for k in range(s)]
    out = []
    for k in reps:
        x = [sum(u_inv[i][j] * k[j] for j in range(n)) for i in range(n)]
        lam = [sum(g_inv[i][j] * x[j] for j in range(n)) for i in range(n)]
        frac = [c - (c.numerator // c.denominator) for c in lam]
        y = [sum(gens[j][i] * frac[j] for j in range(n)) for i in range(n)]
        out.append(tuple(int(c) for c in y))
    return sorted(out)


@dataclass(frozen=True)
class HilbertBasis:
    generators: tuple[IntPoint, ...]
    facets: tuple[IntPoint, ...]

    @property
    def grading(self) -> IntPoint:
        return grading(self.facets)

    def in_cone(self, x: Sequence[int]) -> bool:
        return all(dot(a, x) >= 0 for a in self.facets)


def hilbert_basis(cone_generators: Sequence[Sequence[int]]) -> HilbertBasis:
    """Hilbert basis of the lattice points of a pointed full-dimensional rational cone.

    Triangulates the cone, collects the generators together with the lattice
    points of each half-open fundamental parallelepiped, then sieves out the
    reducible candidates in order of the grading functional.
    """
    gens = sorted(set(primitive(g) for g in cone_generators if any(g)))
    facets = cone_facets(gens)
    deg = grading(facets)
    cands = set(gens)
    for simplex in pulling_triangulation(gens):
        sgens = [gens[i] for i in simplex]
        if abs(det(sgens)) > 1:
            cands.update(p for p in parallelepiped_points(sgens) if any(p))
    ordered = sorted(cands, key=lambda x: (dot(deg, x), x))
    basis: list[IntPoint] = []
    for x in ordered:
        dx = dot(deg, x)
        reducible = False
        for y in ordered:
            if dot(deg, y) >= dx:
                break
            z = sub(x, y)
            if all(dot(a, z) >= 0 for a in facets):
                reducible = True
                break
        if not reducible:
            basis.append(x)
    return HilbertBasis(tuple(sorted(basis)), tuple(facets))


def decompose(target: Sequence[int], generators: Sequence[Sequence[int]],
              facets: Sequence[Sequence[int]]) -> list[IntPoint] | None:
    """Express target as a sum of generators (a multiset), or None.

    Search depth is bounded by the grading value of target, since every
    nonzero generator has grading at least 1.
    """
    deg = grading(facets)
    gens = sorted(set(tuple(g) for g in generators if any(g)), key=lambda g: (-dot(deg, g), g))
    memo: dict[IntPoint, list[IntPoint] | None] = {}

    def rec(x: IntPoint):
        if not any(x):
            return []
        if x in memo:
            return memo[x]
        memo[x] = None
        for g in gens:
            y = sub(x, g)
            if all(dot(a, y) >= 0 for a in facets):
                rest = rec(y)
                if rest is not None:
                    memo[x] = [g] + rest
                    break
        return memo[x]

    return rec(tuple(target))
