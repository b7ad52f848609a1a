"""Constructors for the polytope families used throughout, plus fibration checks."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .lattice import IntPoint, dot, hnf, integer_kernel, lattice_span
from .polytope import Facet, HRepresentation, LatticePolytope, polytope_vertices, unit_cube


@dataclass(frozen=True)
class AffineMap:
    """x -> matrix * x + offset, with integer entries."""

    matrix: tuple[tuple[int, ...], ...]
    offset: IntPoint
    source_dim: int

    @classmethod
    def make(cls, matrix: Sequence[Sequence[int]], offset: Sequence[int], source_dim: int | None = None):
        mat = tuple(tuple(int(c) for c in row) for row in matrix)
        if source_dim is None:
            if not mat:
                raise ValueError("source_dim needed for a map to a point")
            source_dim = len(mat[0])
        if len(offset) != len(mat) or any(len(r) != source_dim for r in mat):
            raise ValueError("inconsistent affine map shape")
        return cls(mat, tuple(int(c) for c in offset), source_dim)

    @classmethod
    def drop_last(cls, d: int) -> "AffineMap":
        """Projection R^(d+1) -> R^d forgetting the last coordinate."""
        return cls.make([[int(i == j) for j in range(d + 1)] for i in range(d)], [0] * d, d + 1)

    @property
    def target_dim(self) -> int:
        return len(self.matrix)

    def __call__(self, x: Sequence) -> tuple:
        return tuple(dot(row, x) + c for row, c in zip(self.matrix, self.offset))

    def compose(self, other: "AffineMap") -> "AffineMap":
        """self o other."""
        m = [[sum(a * other.matrix[k][j] for k, a in enumerate(row))
              for j in range(other.source_dim)] for row in self.matrix]
        return AffineMap.make(m, self(other.offset), other.source_dim)

    def to_json(self) -> dict:
        return {"matrix": [list(r) for r in self.matrix], "offset": list(self.offset),
                "source_dim": self.source_dim}


@dataclass(frozen=True)
class IntervalQuadruple:
    intervals: tuple[tuple[int, int], tuple[int, int], tuple[int, int], tuple[int, int]]

    def __post_init__(self):
        if len(self.intervals) != 4:
            raise ValueError("need exactly four intervals")
        for a, b in self.intervals:
            if a >= b:
                raise ValueError(f"degenerate interval [{a}, {b}]")

    def is_smooth_by_criterion(self) -> bool:
        (a1, b1), (a2, b2), (a3, b3), (a4, b4) = self.intervals
        return a1 + a4 == a2 + a3 and b1 + b4 == b2 + b3


SQUARE_CORNERS: tuple[IntPoint, ...] = ((0, 0), (1, 0), (0, 1), (1, 1))


def make_segment_polytope(q: IntervalQuadruple | Sequence[Sequence[int]]) -> LatticePolytope:
    if not isinstance(q, IntervalQuadruple):
        q = IntervalQuadruple(tuple(tuple(i) for i in q))
    pts = [(x, y, z) for (x, y), iv in zip(SQUARE_CORNERS, q.intervals) for z in iv]
    return LatticePolytope.from_points(pts)


def make_pm(m: int) -> LatticePolytope:
    if m < 0:
        raise ValueError("m must be >= 0")
    return make_segment_polytope([(0, 1), (0, 1), (0, 1), (m, m + 1)])


def unit_square() -> LatticePolytope:
    return unit_cube(2)


def point_polytope() -> LatticePolytope:
    return LatticePolytope((), HRepresentation((), 0))


@dataclass(frozen=True)
class NakajimaSpec:
    base: LatticePolytope
    alpha: AffineMap
    beta: AffineMap

    @classmethod
    def from_forms(cls, base: LatticePolytope, alpha: Sequence[int], beta: Sequence[int]) -> "NakajimaSpec":
        """Forms are integer vectors [c_1, ..., c_d, c_0] meaning c . x + c_0."""
        d = base.dim
        if len(alpha) != d + 1 or len(beta) != d + 1:
            raise ValueError(f"affine forms over dimension {d} need {d + 1} coefficients")
        return cls(base, AffineMap.make([alpha[:d]], [alpha[d]], d), AffineMap.make([beta[:d]], [beta[d]], d))


def _base_points(base: LatticePolytope) -> list[IntPoint]:
    return [()] if base.dim == 0 else base.lattice_points()


def make_nakajima(spec: NakajimaSpec) -> tuple[LatticePolytope, AffineMap]:
    """Q(alpha, beta) = conv{(x, y) : x in Q, alpha(x) <= y <= beta(x)} and its projection to Q."""
    for x in _base_points(spec.base):
        if spec.alpha(x)[0] > spec.beta(x)[0]:
            raise ValueError(f"alpha > beta at lattice point {x}")
    verts = spec.base.vertices if spec.base.dim else [()]
    pts = set()
    for v in verts:
        pts.add(tuple(v) + spec.alpha(v))
        pts.add(tuple(v) + spec.beta(v))
    poly = LatticePolytope.from_points(pts)
    return poly, AffineMap.drop_last(spec.base.dim)


@dataclass
class FamilyInstance:
    """A polytope with its canonical fibration onto a base polytope, when one exists."""

    key: str
    polytope: LatticePolytope
    fibration: AffineMap | None = None
    base: LatticePolytope | None = None
    steps: list[tuple[list[int], list[int]]] = field(default_factory=list)
    diagonal: str = "main"


def make_nakajima_tower(steps: Sequence[tuple[Sequence[int], Sequence[int]]]) -> list[tuple[LatticePolytope, AffineMap]]:
    """Fold Q(alpha, beta) steps starting from a point; returns every level."""
    cur = point_polytope()
    levels = []
    for alpha, beta in steps:
        spec = NakajimaSpec.from_forms(cur, list(alpha), list(beta))
        cur, f = make_nakajima(spec)
        levels.append((cur, f))
    return levels


def nakajima_sweep(max_dim: int = 4, coeffs: Sequence[int] = (-1, 0, 1), consts: Sequence[int] = (0, 1, 2),
                   limit: int | None = None, max_volume: int = 24) -> list[list[tuple[list[int], list[int]]]]:
    """Deterministic list of iterated Q(alpha, beta) step lists up to ``max_dim``.

    Each level takes alpha = 0 or a shifted form and beta from a small grid of
    integer affine forms with alpha <= beta on the base lattice points.
    """
    out: list[list[tuple[list[int], list[int]]]] = []
    frontier: list[tuple[list, LatticePolytope]] = [([], point_polytope())]
    for d in range(max_dim):
        nxt = []
        for steps, base in frontier:
            pts = _base_points(base)
            for lin in itertools.product(coeffs, repeat=d):
                for c in consts:
                    beta = list(lin) + [c]
                    for alpha in ([0] * (d + 1), [0] * d + [-1]):
                        diffs = [dot(beta[:d], x) + beta[d] - dot(alpha[:d], x) - alpha[d] for x in pts]
                        if min(diffs) < 0 or max(diffs) == 0:
                            continue
                        new = steps + [(alpha, beta)]
                        poly = make_nakajima_tower(new)[-1][0]
                        if poly.normalized_volume > max_volume:
                            continue
                        nxt.append((new, poly))
        frontier = nxt[:6] + nxt[6::max(1, len(nxt) // 6)]
        out.extend(s for s, _ in frontier)
    return out if limit is None else out[:limit]


def product_with_segment(p: LatticePolytope) -> LatticePolytope:
    """P x [0, 1]."""
    pts = [tuple(v) + (h,) for v in (p.vertices if p.dim else [()]) for h in (0, 1)]
    return LatticePolytope.from_points(pts)


def product_vertex_order(p: LatticePolytope) -> list[IntPoint]:
    """Vertices of P x [0,1] ordered by (base vertex index, height)."""
    return [tuple(v) + (h,) for v in p.vertices for h in (0, 1)]


def _fiber(f: AffineMap, p: LatticePolytope, x: Sequence[int], kernel: list[IntPoint]):
    """Vertices (in R^d1) of the fiber f^-1(x) within P, or [] if empty."""
    d1 = f.source_dim
    rows = [list(r) for r in f.matrix]
    rhs = [xi - c for xi, c in zip(x, f.offset)]
    y0 = _particular_solution(rows, rhs, d1)
    if y0 is None:
        return []
    k = len(kernel)
    if k == 0:
        return [tuple(y0)] if p.contains(y0) else []
    facets = []
    for fa in p.facets:
        normal = tuple(dot(fa.normal, kv) for kv in kernel)
        offset = fa.offset - dot(fa.normal, y0)
        if not any(normal):
            if offset > 0:
                return []
            continue
        facets.append(Facet(normal, offset))
    try:
        ts = polytope_vertices(HRepresentation(tuple(facets), k))
    except ValueError:
        ts = []
    return [tuple(c + sum(Fraction(t[j]) * kernel[j][i] for j in range(k))
                  for i, c in enumerate(y0)) for t in ts]


def _particular_solution(rows, rhs, n):
    """Some rational solution of rows * y = rhs, or None."""
    m = len(rows)
    if m == 0:
        return [Fraction(0)] * n
    a = [[Fraction(c) for c in r] + [Fraction(b)] for r, b in zip(rows, rhs)]
    piv_cols = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [v * inv for v in a[r]]
        for i in range(m):
            if i != r and a[i][c] != 0:
                fct = a[i][c]
                a[i] = [v - fct * w for v, w in zip(a[i], a[r])]
        piv_cols.append(c)
        r += 1
        if r == m:
            break
    if any(a[i][n] != 0 for i in range(r, m)):
        return None
    y = [Fraction(0)] * n
    for i, c in enumerate(piv_cols):
        y[c] = a[i][n]
    return y


@dataclass
class FibrationCheck:
    ok: bool
    fiber_table: dict[IntPoint, tuple[IntPoint, IntPoint]]
    failure: str | None = None


def check_fibration(f: AffineMap, p: LatticePolytope, q: LatticePolytope) -> tuple[bool, FibrationCheck]:
    """Check the three lattice segmental fibration conditions over Q's lattice points.

    Also checks that f splits L(P) as L(Q) + Z (rank drop of one, surjective
    on lattices).
    """
    table: dict[IntPoint, tuple[IntPoint, IntPoint]] = {}
    if f.source_dim != p.dim or f.target_dim != q.dim:
        return False, FibrationCheck(False, table, "dimension mismatch")
    p_pts = p.lattice_points()
    q_pts = _base_points(q)
    q_set = set(q_pts)
    for v in p.vertices:
        if not (q.contains(f(v)) if q.dim else True):
            return False, FibrationCheck(False, table, f"f({v}) lies outside Q")
    kernel = integer_kernel(f.matrix) if f.target_dim else [tuple(int(i == j) for j in range(p.dim)) for i in range(p.dim)]
    one_dim = False
    for x in q_pts:
        verts = sorted(set(_fiber(f, p, x, kernel)))
        if not verts:
            return False, FibrationCheck(False, table, f"(i) empty fiber over {x}")
        if any(Fraction(c).denominator != 1 for v in verts for c in v):
            return False, FibrationCheck(False, table, f"(i) fiber over {x} has non-lattice endpoints")
        verts = [tuple(int(c) for c in v) for v in verts]
        if len(verts) > 2:
            return False, FibrationCheck(False, table, f"(i) fiber over {x} has dimension > 1")
        if len(verts) == 2:
            one_dim = True
        table[tuple(x)] = (verts[0], verts[-1])
    if not one_dim:
        return False, FibrationCheck(False, table, "(ii) no one-dimensional fiber")
    for y in p_pts:
        if f(y) not in q_set:
            return False, FibrationCheck(False, table, f"(iii) lattice point {y} maps off Q's lattice points")
    lp = lattice_span(p_pts)
    lq = lattice_span(q_pts)
    images = [tuple(dot(row, b) for row in f.matrix) for b in lp.basis_vectors]
    img = hnf([v for v in images if any(v)]) if any(any(v) for v in images) else []
    if lp.rank != lq.rank + 1 or tuple(img) != lq.basis_vectors:
        return False, FibrationCheck(False, table, "L(P) does not split as L(Q) + Z")
    return True, FibrationCheck(True, table)


def build_family(spec: dict) -> FamilyInstance:
    """Instantiate a family spec dict (see the CLI's generate command)."""
    fam = spec.get("family")
    if fam == "pm":
        m = int(spec["m"])
        return FamilyInstance(f"pm:{m}", make_pm(m), AffineMap.drop_last(2), unit_square(),
                              diagonal=spec.get("diagonal", "main"))
    if fam == "segment_polytope":
        ivs = [tuple(int(c) for c in iv) for iv in spec["intervals"]]
        key = "segment_polytope:" + ",".join(f"[{a},{b}]" for a, b in ivs)
        return FamilyInstance(key, make_segment_polytope(ivs), AffineMap.drop_last(2), unit_square(),
                              diagonal=spec.get("diagonal", "main"))
    if fam == "nakajima":
        steps = [(list(s["alpha"]), list(s["beta"])) for s in spec["steps"]]
        if not steps:
            raise ValueError("nakajima spec needs at least one step")
        levels = make_nakajima_tower(steps)
        poly, f = levels[-1]
        base = levels[-2][0] if len(levels) > 1 else point_polytope()
        key = "nakajima:" + ";".join(f"{a}|{b}" for a, b in steps)
        return FamilyInstance(key, poly, f, base, steps=steps)
    if fam == "cube":
        d = int(spec.get("dim", 3))
        steps = [([0] * k + [0], [0] * k + [1]) for k in range(d)]
        inst = build_family({"family": "nakajima", "steps": [{"alpha": a, "beta": b} for a, b in steps]})
        inst.key = f"cube:{d}"
        return inst
    if fam == "product":
        inner = build_family(spec["base"])
        poly = product_with_segment(inner.polytope)
        return FamilyInstance(f"product:{inner.key}", poly)
    if fam == "points":
        pts = [tuple(int(c) for c in p) for p in spec["points"]]
        return FamilyInstance("points", LatticePolytope.from_points(pts))
    raise ValueError(f"unknown family {fam!r}")


__all__ = [
    "AffineMap",
    "FamilyInstance",
    "IntervalQuadruple",
    "NakajimaSpec",
    "build_family",
    "check_fibration",
    "make_nakajima",
    "make_nakajima_tower",
    "make_pm",
    "nakajima_sweep",
    "point_polytope",
    "unit_square",
    "make_segment_polytope",
    "product_with_segment",
]
