"""Exact integer linear algebra: Hermite and Smith normal forms, sublattices.

Points are plain tuples of Python ints.  Matrices are lists of rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

IntPoint = tuple[int, ...]


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with x*a + y*b == g == gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def primitive(v: Sequence[int]) -> IntPoint:
    g = 0
    for c in v:
        g = gcd(g, c)
    if g <= 1:
        return tuple(v)
    return tuple(c // g for c in v)


def dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b))


def sub(a: Sequence[int], b: Sequence[int]) -> IntPoint:
    return tuple(x - y for x, y in zip(a, b))


def add(a: Sequence[int], b: Sequence[int]) -> IntPoint:
    return tuple(x + y for x, y in zip(a, b))


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(m: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*m)]


def rank(rows: Sequence[Sequence]) -> int:
    """Rank over Q, by fraction-free elimination."""
    m = [list(r) for r in rows if any(r)]
    if not m:
        return 0
    r = 0
    ncols = len(m[0])
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, len(m)):
            if m[i][c]:
                f, p = m[i][c], m[r][c]
                m[i] = [p * x - f * y for x, y in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


def det(m: Sequence[Sequence]) -> int | Fraction:
    """Determinant by Bareiss elimination (exact for int and Fraction entries)."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(r) for r in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                a[i][j] = num / prev if isinstance(num, Fraction) else num // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def solve(m: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """Solve the square system m x = b over Q; None if singular."""
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(bi)] for row, bi in zip(m, b)]
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            return None
        a[c], a[piv] = a[piv], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for i in range(n):
            if i != c and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return [a[i][n] for i in range(n)]


def inverse(m: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m)]
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            raise ValueError("matrix is singular")
        a[c], a[piv] = a[piv], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for i in range(n):
            if i != c and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return [row[n:] for row in a]


def hnf(rows: Sequence[Sequence[int]], with_transform: bool = False):
    """Row-style Hermite normal form.

    Returns the nonzero rows of H, where H = U * rows for a unimodular U.
    Pivots are positive and strictly move right; entries above a pivot lie
    in [0, pivot).  With ``with_transform`` returns (H_rows, U) where U is
    the full square transform; rows of U past len(H_rows) span the left
    kernel.
    """
    a = [list(r) for r in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    u = identity(m) if with_transform else None
    r = 0
    for c in range(n):
        if r == m:
            break
        for i in range(r + 1, m):
            if a[i][c] == 0:
                continue
            p, q = a[r][c], a[i][c]
            g, x, y = xgcd(p, q)
            pg, qg = p // g, q // g
            ar, ai = a[r], a[i]
            a[r] = [x * s + y * t for s, t in zip(ar, ai)]
            a[i] = [-qg * s + pg * t for s, t in zip(ar, ai)]
            if u is not None:
                ur, ui = u[r], u[i]
                u[r] = [x * s + y * t for s, t in zip(ur, ui)]
                u[i] = [-qg * s + pg * t for s, t in zip(ur, ui)]
        if a[r][c] == 0:
            continue
        if a[r][c] < 0:
            a[r] = [-s for s in a[r]]
            if u is not None:
                u[r] = [-s for s in u[r]]
        piv = a[r][c]
        for i in range(r):
            f = a[i][c] // piv
            if f:
                a[i] = [s - f * t for s, t in zip(a[i], a[r])]
                if u is not None:
                    u[i] = [s - f * t for s, t in zip(u[i], u[r])]
        r += 1
    h = [tuple(row) for row in a[:r]]
    if with_transform:
        return h, u
    return h


def smith(m: Sequence[Sequence[int]]):
    """Smith normal form.

    Returns (diag, U, V) with U * m * V diagonal, diag the nonzero elementary
    divisors in divisibility order, and U, V unimodular.
    """
    a = [list(r) for r in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    u = identity(rows)
    v = identity(cols)
    diag: list[int] = []
    t = 0
    while t < min(rows, cols):
        entries = [(abs(a[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if a[i][j]]
        if not entries:
            break
        _, pi, pj = min(entries)
        a[t], a[pi] = a[pi], a[t]
        u[t], u[pi] = u[pi], u[t]
        for row in a:
            row[t], row[pj] = row[pj], row[t]
        for row in v:
            row[t], row[pj] = row[pj], row[t]
        done = False
        while not done:
            done = True
            p = a[t][t]
            for i in range(t + 1, rows):
                q = a[i][t] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[t])]
                if a[i][t]:
                    done = False
            for j in range(t + 1, cols):
                q = a[t][j] // p
                if q:
                    for row in a:
                        row[j] -= q * row[t]
                    for row in v:
                        row[j] -= q * row[t]
                if a[t][j]:
                    done = False
            if not done:
                entries = [(abs(a[i][t]), i, t) for i in range(t, rows) if a[i][t]]
                entries += [(abs(a[t][j]), t, j) for j in range(t, cols) if a[t][j]]
                _, pi, pj = min(entries)
                a[t], a[pi] = a[pi], a[t]
                u[t], u[pi] = u[pi], u[t]
                for row in a:
                    row[t], row[pj] = row[pj], row[t]
                for row in v:
                    row[t], row[pj] = row[pj], row[t]
                continue
            # divisibility: fold a non-divisible row into row t and retry
            p = a[t][t]
            bad = next((i for i in range(t + 1, rows)
                        for j in range(t + 1, cols) if a[i][j] % p), None)
            if bad is not None:
                a[t] = [x + y for x, y in zip(a[t], a[bad])]
                u[t] = [x + y for x, y in zip(u[t], u[bad])]
                done = False
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        diag.append(a[t][t])
        t += 1
    return diag, u, v


def elementary_divisors(rows: Sequence[Sequence[int]]) -> list[int]:
    if not rows:
        return []
    return smith(rows)[0]


@dataclass(frozen=True)
class SublatticeBasis:
    """HNF basis of a subgroup of Z^n (rows)."""

    basis_vectors: tuple[IntPoint, ...]
    ambient_dim: int

    @property
    def rank(self) -> int:
        return len(self.basis_vectors)

    def coordinates(self, v: Sequence[int]) -> IntPoint | None:
        """Integer coordinates of v in this basis, or None if v is not in the lattice."""
        z: list[int] = []
        rest = list(v)
        for b in self.basis_vectors:
            c = next(i for i, x in enumerate(b) if x)
            q, r = divmod(rest[c], b[c])
            if r:
                return None
            z.append(q)
            if q:
                rest = [x - q * y for x, y in zip(rest, b)]
        if any(rest):
            return None
        return tuple(z)

    def point(self, z: Sequence[int]) -> IntPoint:
        out = [0] * self.ambient_dim
        for c, b in zip(z, self.basis_vectors):
            if c:
                out = [x + c * y for x, y in zip(out, b)]
        return tuple(out)


def lattice_span(points: Sequence[Sequence[int]]) -> SublatticeBasis:
    """HNF basis of the group generated by all pairwise differences of ``points``."""
    if not points:
        raise ValueError("need at least one point")
    d = len(points[0])
    if any(len(p) != d for p in points):
        raise ValueError("points have mismatched dimensions")
    p0 = points[0]
    diffs = [sub(p, p0) for p in points[1:]]
    diffs = [x for x in diffs if any(x)]
    basis = hnf(diffs) if diffs else []
    return SublatticeBasis(tuple(basis), d)


def smith_summand_check(sub_lattice: SublatticeBasis, ambient_dim: int) -> bool:
    """True iff the sublattice is a direct summand of Z^ambient_dim."""
    if sub_lattice.rank > ambient_dim:
        raise ValueError("rank exceeds ambient dimension")
    return all(e == 1 for e in elementary_divisors(list(sub_lattice.basis_vectors)))


def saturation(sub_lattice: SublatticeBasis) -> SublatticeBasis:
    """HNF basis of (R * L) intersected with Z^n."""
    if sub_lattice.rank == 0:
        return sub_lattice
    # the orthogonal complement of the complement is the saturation
    comp = integer_kernel(list(sub_lattice.basis_vectors))
    if not comp:
        return SublatticeBasis(tuple(hnf(identity(sub_lattice.ambient_dim))), sub_lattice.ambient_dim)
    sat = integer_kernel(comp)
    return SublatticeBasis(tuple(hnf(sat)), sub_lattice.ambient_dim)


def integer_kernel(rows: Sequence[Sequence[int]]) -> list[IntPoint]:
    """Basis of the integer vectors x with rows * x = 0 (a saturated lattice)."""
    if not rows:
        raise ValueError("empty matrix")
    n = len(rows[0])
    h, u = hnf(transpose(rows), with_transform=True)
    return [tuple(r) for r in u[len(h):]] if n > len(h) else []
