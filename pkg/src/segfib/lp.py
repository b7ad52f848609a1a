"""Exact rational linear feasibility by a dense tableau simplex (Bland's rule)."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def phase_one(a_eq: Sequence[Sequence], b_eq: Sequence):
    """Look for x >= 0 with a_eq x = b_eq.

    Returns (x, None) when feasible.  Otherwise returns (None, pi) where pi is
    a Farkas certificate: pi . a_eq[:, j] <= 0 for every column j and
    pi . b_eq > 0.
    """
    m = len(a_eq)
    n = len(a_eq[0]) if m else 0
    rows = []
    sign = []
    for r, b in zip(a_eq, b_eq):
        s = -1 if b < 0 else 1
        sign.append(s)
        rows.append([Fraction(c) * s for c in r] + [Fraction(0)] * m + [Fraction(b) * s])
    for i in range(m):
        rows[i][n + i] = Fraction(1)
    basis = [n + i for i in range(m)]
    width = n + m
    # reduced costs for minimising the artificial sum
    cost = [Fraction(0)] * (width + 1)
    for i in range(m):
        for j in range(n):
            cost[j] -= rows[i][j]
        cost[width] -= rows[i][width]
    while True:
        enter = next((j for j in range(width) if cost[j] < 0), None)
        if enter is None:
            break
        best = None
        for i in range(m):
            c = rows[i][enter]
            if c > 0:
                ratio = rows[i][width] / c
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            # cannot happen for a bounded phase-one problem
            raise ArithmeticError("phase one unbounded")
        _pivot(rows, cost, best[1], enter)
        basis[best[1]] = enter
    if cost[width] != 0:
        pi = _farkas_from_costs(cost, n, m, sign)
        return None, pi
    x = [Fraction(0)] * n
    for i, j in enumerate(basis):
        if j < n:
            x[j] = rows[i][width]
    return x, None


def _farkas_from_costs(cost, n, m, sign):
    # the cost row tracks c - y.A, so an artificial column reads 1 - y_i
    return [(1 - cost[n + i]) * sign[i] for i in range(m)]


def _pivot(rows, cost, r, c):
    piv = rows[r][c]
    if piv != 1:
        rows[r] = [v / piv for v in rows[r]]
    pr = rows[r]
    nz = [j for j, v in enumerate(pr) if v]
    for i, row in enumerate(rows):
        if i != r and row[c]:
            f = row[c]
            for j in nz:
                row[j] -= f * pr[j]
    if cost[c]:
        f = cost[c]
        for j in nz:
            cost[j] -= f * pr[j]


def strictly_feasible(rows: Sequence[Sequence]):
    """Find w with row . w >= 1 for every row, via the Farkas alternative.

    Returns (w, None) on success, or (None, y) with y >= 0, sum(y) = 1 and
    sum_i y_i * row_i = 0, proving that no such w exists.
    """
    if not rows:
        return [], None
    n = len(rows[0])
    # alternative system: y >= 0, A^T y = 0, 1^T y = 1
    a_eq = [[r[j] for r in rows] for j in range(n)] + [[1] * len(rows)]
    b_eq = [0] * n + [1]
    y, pi = phase_one(a_eq, b_eq)
    if y is not None:
        return None, y
    # pi . (row_j, 1) <= 0 for all j and pi_last > 0
    last = pi[n]
    w = [-p / last for p in pi[:n]]
    for r in rows:
        if sum(Fraction(c) * x for c, x in zip(r, w)) < 1:
            raise ArithmeticError("Farkas certificate failed verification")
    return w, None
