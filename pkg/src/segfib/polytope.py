"""Exact polyhedral primitives: double description, convex hulls, lattice points.

The double description routine works on cones {x : <c, x> >= 0 for all c} and
is used in both directions: vertices -> facets (hull) and facets -> vertices
(with a recession check).  Everything is integer or Fraction arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product as iproduct
from typing import Iterable, Sequence

from .lattice import (
    IntPoint,
    SublatticeBasis,
    det,
    dot,
    hnf,
    inverse,
    lattice_span,
    primitive,
    rank,
    sub,
)


class UnboundedError(ValueError):
    """Raised when an H-representation does not describe a bounded set."""


class NotFullDimensionalError(ValueError):
    pass


def _initial_basis(constraints: Sequence[Sequence[int]], n: int) -> list[int]:
    chosen: list[int] = []
    for i, c in enumerate(constraints):
        if not any(c):
            continue
        if rank([constraints[j] for j in chosen] + [c]) > len(chosen):
            chosen.append(i)
            if len(chosen) == n:
                break
    return chosen


def extreme_rays(constraints: Sequence[Sequence[int]], n: int) -> list[tuple[IntPoint, int]]:
    """Extreme rays of the pointed cone {x in R^n : <c, x> >= 0}.

    Returns (primitive integer ray, bitmask of tight constraint indices).
    Raises ValueError if the constraints do not have rank n (cone not pointed).
    """
    basis = _initial_basis(constraints, n)
    if len(basis) < n:
        raise ValueError("cone is not pointed")
    inv = _int_inverse_columns([constraints[i] for i in basis])
    rays: list[tuple[IntPoint, int]] = []
    full = 0
    for i in basis:
        full |= 1 << i
    for j, col in enumerate(inv):
        rays.append((col, full & ~(1 << basis[j])))
    processed = set(basis)
    for idx, c in enumerate(constraints):
        if idx in processed:
            continue
        vals = [dot(c, r) for r, _ in rays]
        pos = [k for k, v in enumerate(vals) if v > 0]
        neg = [k for k, v in enumerate(vals) if v < 0]
        bit = 1 << idx
        if not neg:
            rays = [(r, z | bit) if vals[k] == 0 else (r, z) for k, (r, z) in enumerate(rays)]
            continue
        new: list[tuple[IntPoint, int]] = []
        for k, (r, z) in enumerate(rays):
            if vals[k] > 0:
                new.append((r, z))
            elif vals[k] == 0:
                new.append((r, z | bit))
        zsets = [z for _, z in rays]
        for p in pos:
            rp, zp = rays[p]
            for q in neg:
                rq, zq = rays[q]
                common = zp & zq
                if common.bit_count() < n - 2:
                    continue
                if any(k != p and k != q and (common & ~zk) == 0 for k, zk in enumerate(zsets)):
                    continue
                a, b = vals[p], -vals[q]
                ray = primitive([a * y + b * x for x, y in zip(rp, rq)])
                new.append((ray, common | bit))
        rays = new
        processed.add(idx)
    return rays


def _int_inverse_columns(m: Sequence[Sequence[int]]) -> list[IntPoint]:
    """Primitive integer multiples of the columns of m^-1."""
    inv = inverse(m)
    n = len(m)
    cols = []
    for j in range(n):
        col = [inv[i][j] for i in range(n)]
        den = math.lcm(*(x.denominator for x in col))
        cols.append(primitive([int(x * den) for x in col]))
    return cols


@dataclass(frozen=True, order=True)
class Facet:
    """The inequality <normal, x> >= offset."""

    normal: IntPoint
    offset: int | Fraction

    def value(self, x: Sequence) -> int | Fraction:
        return dot(self.normal, x) - self.offset


@dataclass(frozen=True)
class HRepresentation:
    facets: tuple[Facet, ...]
    ambient_dim: int

    def contains(self, x: Sequence) -> bool:
        return all(f.value(x) >= 0 for f in self.facets)

    def dilate(self, k: int) -> "HRepresentation":
        return HRepresentation(tuple(Facet(f.normal, f.offset * k) for f in self.facets), self.ambient_dim)


def convex_hull(points: Iterable[Sequence[int]]) -> tuple[list[IntPoint], HRepresentation]:
    """Vertices and irredundant facets of conv(points), which must be full-dimensional."""
    pts = sorted(set(tuple(p) for p in points))
    if not pts:
        raise ValueError("empty point set")
    d = len(pts[0])
    if d == 0:
        return [()], HRepresentation((), 0)
    if lattice_span(pts).rank < d:
        raise NotFullDimensionalError("points are not full-dimensional; normalize the lattice first")
    rows = [tuple(p) + (-1,) for p in pts]
    facets: list[tuple[Facet, int]] = []
    for ray, zeros in extreme_rays(rows, d + 1):
        normal, offset = ray[:d], ray[d]
        if not any(normal):
            continue
        facets.append((Facet(tuple(normal), offset), zeros))
    facets.sort()
    verts = []
    for i, p in enumerate(pts):
        tight = [f.normal for f, z in facets if z >> i & 1]
        if len(tight) >= d and rank(tight) == d:
            verts.append(p)
    return verts, HRepresentation(tuple(f for f, _ in facets), d)


def polytope_vertices(hrep: HRepresentation) -> list[tuple]:
    """Vertices of the polytope {x : facets}; raises UnboundedError if unbounded.

    Vertices are integer tuples when integral, otherwise Fraction tuples.
    """
    d = hrep.ambient_dim
    rows = []
    for f in hrep.facets:
        off = Fraction(f.offset)
        rows.append(tuple(c * off.denominator for c in f.normal) + (-off.numerator,))
    rows.append((0,) * d + (1,))
    try:
        rays = extreme_rays(rows, d + 1)
    except ValueError:
        raise UnboundedError("polyhedron contains a line") from None
    verts = []
    for ray, _ in rays:
        t = ray[d]
        if t == 0:
            raise UnboundedError(f"recession direction {ray[:d]}")
        if t < 0:
            continue
        if all(c % t == 0 for c in ray[:d]):
            verts.append(tuple(c // t for c in ray[:d]))
        else:
            verts.append(tuple(Fraction(c, t) for c in ray[:d]))
    return sorted(set(verts))


def _projection_chain(vertices: Sequence[Sequence]) -> list[list[tuple[IntPoint, Fraction]]]:
    """For i = 1..d, facets (normal, offset) of the projection to the first i coordinates."""
    d = len(vertices[0])
    den = math.lcm(*(Fraction(c).denominator for v in vertices for c in v))
    scaled = [tuple(int(Fraction(c) * den) for c in v) for v in vertices]
    chain = []
    for i in range(1, d + 1):
        proj = sorted(set(v[:i] for v in scaled))
        if i == 1:
            lo, hi = proj[0][0], proj[-1][0]
            fs = [((1,), Fraction(lo, den)), ((-1,), Fraction(-hi, den))]
        else:
            _, h = convex_hull(proj)
            fs = [(f.normal, Fraction(f.offset, den)) for f in h.facets]
        chain.append(fs)
    return chain


def _enumerate(chain, k: int) -> list[IntPoint]:
    d = len(chain)
    out: list[IntPoint] = []

    def bounds(prefix: list[int]):
        i = len(prefix)
        lo, hi = None, None
        for normal, offset in chain[i]:
            a = normal[i]
            if a == 0:
                continue
            rhs = offset * k - sum(x * y for x, y in zip(normal, prefix))
            if a > 0:
                b = math.ceil(Fraction(rhs) / a)
                lo = b if lo is None or b > lo else lo
            else:
                b = math.floor(Fraction(rhs) / a)
                hi = b if hi is None or b < hi else hi
        return lo, hi

    def rec(prefix: list[int]):
        lo, hi = bounds(prefix)
        if lo is None or hi is None:
            raise UnboundedError("unbounded coordinate during enumeration")
        if len(prefix) == d - 1:
            # projections are exact, so every value in [lo, hi] is feasible
            base = tuple(prefix)
            out.extend(base + (x,) for x in range(lo, hi + 1))
            return
        for x in range(lo, hi + 1):
            prefix.append(x)
            rec(prefix)
            prefix.pop()

    rec([])
    return out


def enumerate_lattice_points(hrep: HRepresentation) -> list[IntPoint]:
    """All integer points of the bounded polyhedron, in lexicographic order."""
    if hrep.ambient_dim == 0:
        return [()]
    verts = polytope_vertices(hrep)
    if not verts:
        return []
    chain = _projection_chain(verts)
    return _enumerate(chain, 1)


def pulling_triangulation(rays: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Triangulate the pointed cone spanned by ``rays`` (any dimension).

    Returns simplicial cones as sorted tuples of indices into ``rays``.
    Rays that are positive multiples of each other are treated as one.
    """
    rays = [tuple(r) for r in rays]
    if not rays:
        return []
    return sorted(_pull(rays, list(range(len(rays)))))


def _pull(rays: list[IntPoint], idx: list[int]) -> list[tuple[int, ...]]:
    seen: dict[IntPoint, int] = {}
    for i in idx:
        seen.setdefault(primitive(rays[i]), i)
    idx = sorted(seen.values(), key=lambda i: rays[i])
    span = hnf([rays[i] for i in idx])
    e = len(span)
    if e == 1:
        return [(idx[0],)]
    chart = SublatticeBasis(tuple(span), len(rays[0]))
    local = [chart.coordinates(rays[i]) for i in idx]
    facets = [r for r, _ in extreme_rays(local, e)]
    apex = local[0]
    out = []
    for a in facets:
        if dot(a, apex) == 0:
            continue
        on = [idx[j] for j, x in enumerate(local) if dot(a, x) == 0]
        for s in _pull(rays, on):
            out.append(tuple(sorted((idx[0],) + s)))
    return out


def normalized_volume(vertices: Sequence[Sequence[int]]) -> int:
    """d! * volume for a full-dimensional lattice polytope."""
    d = len(vertices[0])
    if d == 0:
        return 1
    cone = [tuple(v) + (1,) for v in vertices]
    return sum(abs(det([cone[i] for i in s])) for s in pulling_triangulation(cone))


@dataclass(frozen=True)
class LatticePolytope:
    """A full-dimensional lattice polytope with exact V- and H-representation."""

    vertices: tuple[IntPoint, ...]
    hrep: HRepresentation = field(compare=False)

    @classmethod
    def from_points(cls, points: Iterable[Sequence[int]]) -> "LatticePolytope":
        verts, h = convex_hull(points)
        return cls(tuple(verts), h)

    @property
    def dim(self) -> int:
        return self.hrep.ambient_dim

    @property
    def facets(self) -> tuple[Facet, ...]:
        return self.hrep.facets

    def contains(self, x: Sequence) -> bool:
        return self.hrep.contains(x)

    @cached_property
    def _chain(self):
        return _projection_chain(self.vertices)

    def lattice_points(self, k: int = 1) -> list[IntPoint]:
        """Lattice points of the k-th dilate, lexicographically sorted."""
        if self.dim == 0:
            return [()]
        if k == 0:
            return [(0,) * self.dim]
        return _enumerate(self._chain, k)

    @cached_property
    def normalized_volume(self) -> int:
        return normalized_volume(self.vertices)

    def facet_vertices(self, facet: Facet) -> list[IntPoint]:
        return [v for v in self.vertices if facet.value(v) == 0]

    def edges(self) -> list[tuple[IntPoint, IntPoint]]:
        """Pairs of vertices spanning an edge (tight facets have rank d - 1)."""
        d = self.dim
        if d == 1:
            return [tuple(self.vertices)] if len(self.vertices) == 2 else []
        tight = {v: [f.normal for f in self.facets if f.value(v) == 0] for v in self.vertices}
        out = []
        for i, u in enumerate(self.vertices):
            for w in self.vertices[i + 1:]:
                common = [n for n in tight[u] if n in tight[w]]
                if len(common) >= d - 1 and rank(common) == d - 1:
                    out.append((u, w))
        return out

    def faces(self) -> list[tuple[IntPoint, ...]]:
        """Vertex sets of all nonempty faces, including the polytope itself."""
        facet_sets = [frozenset(self.facet_vertices(f)) for f in self.facets]
        found = {frozenset(self.vertices)}
        frontier = set(facet_sets)
        while frontier:
            found |= frontier
            nxt = set()
            for a in frontier:
                for b in facet_sets:
                    c = a & b
                    if c and c not in found:
                        nxt.add(c)
            frontier = nxt
        for v in self.vertices:
            found.add(frozenset([v]))
        return sorted(tuple(sorted(s)) for s in found)


def unit_cube(d: int) -> LatticePolytope:
    return LatticePolytope.from_points(iproduct((0, 1), repeat=d))


def affine_chart(points: Sequence[Sequence]) -> tuple[tuple, list[list[Fraction]]]:
    """Rational affine coordinates on aff(points): (origin, basis rows).

    Basis rows are an HNF basis of the lattice spanned by the differences,
    after clearing denominators.
    """
    o = tuple(points[0])
    diffs = [tuple(Fraction(a) - Fraction(b) for a, b in zip(p, o)) for p in points[1:]]
    den = math.lcm(1, *(x.denominator for v in diffs for x in v))
    ints = [tuple(int(x * den) for x in v) for v in diffs if any(v)]
    basis = hnf(ints) if ints else []
    return o, [[Fraction(x, den) for x in b] for b in basis]


def chart_coordinates(origin, basis, x) -> tuple[Fraction, ...] | None:
    """Coordinates of x in the affine chart, or None if x is off the affine span."""
    v = [Fraction(a) - Fraction(b) for a, b in zip(x, origin)]
    z = []
    for b in basis:
        c = next(i for i, t in enumerate(b) if t)
        q = v[c] / b[c]
        z.append(q)
        if q:
            v = [s - q * t for s, t in zip(v, b)]
    if any(v):
        return None
    return tuple(z)


def point_in_hull(x, points: Sequence[Sequence]) -> bool:
    """Exact membership of x in conv(points), for any (possibly lower) dimension."""
    origin, basis = affine_chart(points)
    z = chart_coordinates(origin, basis, x)
    if z is None:
        return False
    if not basis:
        return True
    local = [chart_coordinates(origin, basis, p) for p in points]
    den = math.lcm(*(c.denominator for v in local + [z] for c in v))
    ints = [tuple(int(c * den) for c in v) for v in local]
    _, h = convex_hull(ints)
    return h.contains(tuple(c * den for c in z))


def relative_volume(points: Sequence[Sequence], origin, basis) -> Fraction:
    """Normalized volume of conv(points) measured in the given affine chart."""
    local = [chart_coordinates(origin, basis, p) for p in points]
    e = len(basis)
    if e == 0:
        return Fraction(1)
    den = math.lcm(*(c.denominator for v in local for c in v))
    ints = sorted(set(tuple(int(c * den) for c in v) for v in local))
    verts, _ = convex_hull(ints)
    return Fraction(normalized_volume(verts), den ** e)


def simplex_volume_in_chart(points: Sequence[Sequence], origin, basis) -> Fraction:
    local = [chart_coordinates(origin, basis, p) for p in points]
    return abs(Fraction(det([[a - b for a, b in zip(p, local[0])] for p in local[1:]])))


__all__ = [
    "Facet",
    "HRepresentation",
    "LatticePolytope",
    "NotFullDimensionalError",
    "UnboundedError",
    "convex_hull",
    "enumerate_lattice_points",
    "extreme_rays",
    "normalized_volume",
    "point_in_hull",
    "polytope_vertices",
    "pulling_triangulation",
    "unit_cube",
]
