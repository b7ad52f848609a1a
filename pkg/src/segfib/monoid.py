"""Graded polytopal monoids, their normalizations, gaps and related invariants."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .cones import decompose, hilbert_basis
from .lattice import (
    IntPoint,
    SublatticeBasis,
    det,
    elementary_divisors,
    lattice_span,
    primitive,
    rank,
    saturation,
    smith_summand_check,
    sub,
)
from .polytope import LatticePolytope

DEFAULT_KMAX = 64


@dataclass(frozen=True)
class PointConfig:
    """A finite set of lattice points, kept sorted and deduplicated."""

    dim: int
    points: tuple[IntPoint, ...]

    @classmethod
    def from_points(cls, points: Iterable[Sequence[int]]) -> "PointConfig":
        pts = sorted(set(tuple(int(c) for c in p) for p in points))
        if not pts:
            raise ValueError("empty configuration")
        d = len(pts[0])
        if any(len(p) != d for p in pts):
            raise ValueError("points have mismatched dimensions")
        return cls(d, tuple(pts))

    @classmethod
    def of_polytope(cls, polytope: LatticePolytope) -> "PointConfig":
        return cls(polytope.dim, tuple(polytope.lattice_points()))

    @property
    def span(self) -> SublatticeBasis:
        return lattice_span(self.points)

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class LatticeChart:
    """Affine identification of origin + L(A) with Z^rank."""

    origin: IntPoint
    basis: SublatticeBasis

    def to_local(self, x: Sequence[int]) -> IntPoint:
        z = self.basis.coordinates(sub(x, self.origin))
        if z is None:
            raise ValueError(f"{x} is not in the affine lattice")
        return z

    def from_local(self, z: Sequence[int], height: int = 1) -> IntPoint:
        """Map a height-graded local point back; ``height`` scales the origin."""
        v = self.basis.point(z)
        return tuple(height * o + c for o, c in zip(self.origin, v))


def lattice_chart(config: PointConfig) -> LatticeChart:
    return LatticeChart(config.points[0], config.span)


def normalize_lattice(config: PointConfig) -> PointConfig:
    """Re-express the configuration in coordinates of its affine lattice L(A)."""
    chart = lattice_chart(config)
    return PointConfig.from_points(chart.to_local(p) for p in config.points)


def _saturated_chart(config: PointConfig) -> LatticeChart:
    return LatticeChart(config.points[0], saturation(config.span))


@dataclass(frozen=True)
class GradedMonoidSlices:
    height_slices: tuple[tuple[IntPoint, ...], ...]
    kind: str

    def __getitem__(self, k: int) -> tuple[IntPoint, ...]:
        return self.height_slices[k]

    def counts(self) -> list[int]:
        return [len(s) for s in self.height_slices]


def _minkowski(a: Iterable[IntPoint], b: Sequence[IntPoint]) -> set[IntPoint]:
    return {tuple(x + y for x, y in zip(p, q)) for p in a for q in b}


def generated_slices(config: PointConfig, k_max: int) -> GradedMonoidSlices:
    """Degree-k elements of the monoid generated by (a, 1), a in A, for k <= k_max."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    gens = config.points
    slices = [((0,) * config.dim,)]
    cur = set(gens)
    slices.append(tuple(sorted(cur)))
    for _ in range(2, k_max + 1):
        cur = _minkowski(cur, gens)
        slices.append(tuple(sorted(cur)))
    return GradedMonoidSlices(tuple(slices), "generated")


def normalized_slices(config: PointConfig, k_max: int) -> GradedMonoidSlices:
    """Lattice points of k * conv(A) for k <= k_max; config must be lattice-normalized."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    poly = LatticePolytope.from_points(config.points)
    slices = [tuple(poly.lattice_points(k)) for k in range(k_max + 1)]
    return GradedMonoidSlices(tuple(slices), "normalized")


@dataclass
class GapReport:
    gap_vector: list[int]
    gamma: int
    witnesses: list[tuple[int, IntPoint]]
    stop_height: int | None
    capped: bool = False
    cap_reason: str | None = None
    counts: list[tuple[int, int]] = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        out = {
            "gap_vector": list(self.gap_vector),
            "gamma": self.gamma,
            "witnesses": [{"height": k, "point": list(p)} for k, p in self.witnesses],
            "stop_height": self.stop_height,
        }
        if self.capped:
            out["capped"] = True
            out["cap_reason"] = self.cap_reason
        return out


def module_degree_bound(config: PointConfig) -> int:
    """Degree bound for generators of the normalization as a module over M_A.

    d - 1 when A is all lattice points of its hull (normalized), d otherwise.
    """
    d = config.dim
    poly = LatticePolytope.from_points(config.points)
    if len(poly.lattice_points()) == len(config.points):
        return max(d - 1, 1)
    return max(d, 1)


def gap_vector(config: PointConfig, k_max: int = DEFAULT_KMAX,
               time_budget: float | None = None, extra_heights: int = 0) -> GapReport:
    """Count gaps height by height until the stabilization rule fires.

    The rule: once a height k0 >= the module degree bound has no gaps, no
    higher height has gaps.  ``extra_heights`` computes that many further
    heights after the stop (for soundness checks); their counts land in
    ``report.counts``.
    """
    chart = lattice_chart(config)
    local = normalize_lattice(config)
    d = local.dim
    if d == 0:
        return GapReport([], 0, [], 1, counts=[(1, 1)])
    poly = LatticePolytope.from_points(local.points)
    bound = module_degree_bound(local)
    deadline = None if time_budget is None else time.monotonic() + time_budget
    gens = local.points
    cur: set[IntPoint] = {(0,) * d}
    gv: list[int] = []
    witnesses: list[tuple[int, IntPoint]] = []
    counts: list[tuple[int, int]] = []
    stop = None
    k = 0
    while True:
        k += 1
        cur = _minkowski(cur, gens)
        full = poly.lattice_points(k)
        counts.append((len(full), len(cur)))
        gaps = len(full) - len(cur)
        if stop is None:
            gv.append(gaps)
            if gaps:
                w = min(p for p in full if p not in cur)
                witnesses.append((k, chart.from_local(w, k)))
            if gaps == 0 and k >= bound:
                stop = k
        if stop is not None and k >= stop + extra_heights:
            break
        if stop is None and k >= k_max:
            break
        if stop is None and deadline is not None and time.monotonic() > deadline:
            break
    if stop is None:
        reason = "height cap" if k >= k_max else "time budget"
        return GapReport(gv, k, witnesses, None, True, reason, counts)
    while gv and gv[-1] == 0:
        gv.pop()
    return GapReport(gv, len(gv), witnesses, stop, counts=counts)


def is_very_ample(config: PointConfig) -> tuple[bool, dict]:
    """Check that at every vertex v the cone lattice points are generated by A - v.

    Certificate: per vertex, the Hilbert basis of the vertex cone and a
    decomposition of each basis element into elements of A - v.
    """
    local = normalize_lattice(config)
    if local.dim == 0:
        return True, {"vertices": []}
    poly = LatticePolytope.from_points(local.points)
    ok = True
    per_vertex = []
    for v in poly.vertices:
        gens = [sub(a, v) for a in local.points if a != v]
        hb = hilbert_basis(gens)
        entries = []
        for h in hb.generators:
            terms = decompose(h, gens, hb.facets)
            if terms is None:
                ok = False
            entries.append({"element": list(h),
                            "terms": None if terms is None else [list(t) for t in terms]})
        per_vertex.append({"vertex": list(v),
                           "hilbert_basis": [list(h) for h in hb.generators],
                           "decompositions": entries})
    return ok, {"coordinates": "lattice-normalized", "vertices": per_vertex}


def is_integrally_closed(config: PointConfig, k_max: int = DEFAULT_KMAX) -> tuple[bool, int | None]:
    """(closed?, first height where a lattice point of k*conv(A) is not a sum of k points of A)."""
    if len(config.points) == 1:
        return True, None
    if smith_summand_check(config.span, config.dim):
        rep = gap_vector(config, k_max)
        first = next((k + 1 for k, g in enumerate(rep.gap_vector) if g > 0), None)
        return first is None and not rep.capped, first
    chart = _saturated_chart(config)
    local = [chart.to_local(p) for p in config.points]
    poly = LatticePolytope.from_points(local)
    cur = {(0,) * len(local[0])}
    for k in range(1, k_max + 1):
        cur = _minkowski(cur, local)
        if len(poly.lattice_points(k)) > len(cur):
            return False, k
    return False, None


def is_smooth(polytope: LatticePolytope) -> bool:
    """Primitive edge directions at each vertex form a lattice basis."""
    d = polytope.dim
    nbrs: dict[IntPoint, list[IntPoint]] = {v: [] for v in polytope.vertices}
    for u, w in polytope.edges():
        nbrs[u].append(primitive(sub(w, u)))
        nbrs[w].append(primitive(sub(u, w)))
    for v, dirs in nbrs.items():
        if len(dirs) != d or abs(det(dirs)) != 1:
            return False
    return True


class EhrhartMismatchError(RuntimeError):
    pass


@dataclass(frozen=True)
class EhrhartPolynomial:
    """Coefficients in ascending degree order: c0 + c1 j + ... + cd j^d."""

    coefficients: tuple[Fraction, ...]

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, j: int) -> Fraction:
        return sum((c * j ** i for i, c in enumerate(self.coefficients)), Fraction(0))

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coefficients]


def _interpolate(xs: Sequence[int], ys: Sequence[int]) -> list[Fraction]:
    n = len(xs)
    coeffs = [Fraction(0)] * n
    for i in range(n):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j in range(n):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for t in range(len(basis) - 1):
                basis[t] -= xs[j] * basis[t + 1]
            denom *= xs[i] - xs[j]
        for t in range(n):
            coeffs[t] += ys[i] * basis[t] / denom
    return coeffs


def ehrhart_polynomial(polytope: LatticePolytope) -> EhrhartPolynomial:
    """Interpolate through counts at j = 0..d; check against j = d+1, d+2."""
    d = polytope.dim
    xs = list(range(d + 1))
    ys = [len(polytope.lattice_points(j)) for j in xs]
    poly = EhrhartPolynomial(tuple(_interpolate(xs, ys)))
    for j in (d + 1, d + 2):
        n = len(polytope.lattice_points(j))
        if poly(j) != n:
            raise EhrhartMismatchError(f"interpolant gives {poly(j)} at j={j}, direct count {n}")
    return poly


def config_vertices(config: PointConfig) -> list[IntPoint]:
    """Vertices of conv(A) in the original coordinates (any dimension)."""
    chart = lattice_chart(config)
    local = [chart.to_local(p) for p in config.points]
    if not local[0]:
        return [config.points[0]]
    poly = LatticePolytope.from_points(local)
    return sorted(chart.from_local(v) for v in poly.vertices)


def rarify(config: PointConfig, c: int) -> PointConfig:
    """Union over vertices v of conv(A) of the translates (c - 1) v + A."""
    if c < 1:
        raise ValueError("c must be >= 1")
    out = set()
    for v in config_vertices(config):
        shift = tuple((c - 1) * x for x in v)
        out.update(tuple(a + s for a, s in zip(p, shift)) for p in config.points)
    return PointConfig.from_points(out)


def is_unimodular_simplex(simplex_vertices: Sequence[Sequence[int]]) -> bool:
    """Difference vectors extend to a basis of Z^d."""
    verts = [tuple(v) for v in simplex_vertices]
    diffs = [sub(v, verts[0]) for v in verts[1:]]
    if not diffs:
        return True
    if rank(diffs) < len(diffs):
        raise ValueError("simplex vertices are affinely dependent")
    return all(e == 1 for e in elementary_divisors(diffs))
