"""Small dense two-phase simplex over exact rationals (Bland's rule)."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import AuctionError


class Infeasible(AuctionError):
    pass


class Unbounded(AuctionError):
    pass


@dataclass(frozen=True)
class LPResult:
    x: tuple[Fraction, ...]
    value: Fraction


def _pivot(rows, rhs, obj, r, col):
    piv = rows[r][col]
    row = [a / piv for a in rows[r]]
    rows[r] = row
    rhs[r] = rhs[r] / piv
    for i in range(len(rows)):
        if i != r:
            f = rows[i][col]
            if f:
                rows[i] = [a - f * b for a, b in zip(rows[i], row)]
                rhs[i] -= f * rhs[r]
    f = obj[0][col]
    if f:
        obj[0] = [a - f * b for a, b in zip(obj[0], row)]
        obj[1] -= f * rhs[r]


def _run(rows, rhs, basis, cost, allowed):
    # obj = (reduced costs, -objective value)
    red = list(cost)
    val = Fraction(0)
    for i, b in enumerate(basis):
        if cost[b]:
            f = cost[b]
            red = [a - f * x for a, x in zip(red, rows[i])]
            val -= f * rhs[i]
    obj = [red, val]
    while True:
        col = next((j for j in allowed if obj[0][j] < 0), None)
        if col is None:
            return -obj[1]
        best = None
        for i in range(len(rows)):
            a = rows[i][col]
            if a > 0:
                ratio = rhs[i] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            raise Unbounded("objective is unbounded below")
        _pivot(rows, rhs, obj, best[1], col)
        basis[best[1]] = col


def solve_lp(
    c: Sequence,
    A_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    A_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
) -> LPResult:
    """Minimise ``c @ x`` subject to ``A_ub @ x <= b_ub``, ``A_eq @ x == b_eq``, ``x >= 0``."""
    n = len(c)
    m_ub, m_eq = len(A_ub), len(A_eq)
    m = m_ub + m_eq
    n_art = sum(1 for b in b_ub if Fraction(b) < 0) + m_eq
    width = n + m_ub + n_art
    rows, rhs, basis = [], [], []
    art = n + m_ub
    for i, (a, b) in enumerate(zip(A_ub, b_ub)):
        row = [Fraction(x) for x in a] + [Fraction(0)] * (m_ub + n_art)
        row[n + i] = Fraction(1)
        b = Fraction(b)
        if b < 0:
            row = [-x for x in row]
            b = -b
            row[art] = Fraction(1)
            basis.append(art)
            art += 1
        else:
            basis.append(n + i)
        rows.append(row)
        rhs.append(b)
    for a, b in zip(A_eq, b_eq):
        row = [Fraction(x) for x in a] + [Fraction(0)] * (m_ub + n_art)
        b = Fraction(b)
        if b < 0:
            row = [-x for x in row]
            b = -b
        row[art] = Fraction(1)
        basis.append(art)
        art += 1
        rows.append(row)
        rhs.append(b)
    assert len(rows) == m

    if n_art:
        phase1 = [Fraction(0)] * (n + m_ub) + [Fraction(1)] * n_art
        if _run(rows, rhs, basis, phase1, range(width)) > 0:
            raise Infeasible("no feasible point")
        i = 0
        while i < len(rows):
            if basis[i] >= n + m_ub:
                col = next((j for j in range(n + m_ub) if rows[i][j] != 0), None)
                if col is None:
                    del rows[i], rhs[i], basis[i]
                    continue
                obj = [[Fraction(0)] * width, Fraction(0)]
                _pivot(rows, rhs, obj, i, col)
                basis[i] = col
            i += 1

    cost = [Fraction(x) for x in c] + [Fraction(0)] * (m_ub + n_art)
    value = _run(rows, rhs, basis, cost, range(n + m_ub))
    x = [Fraction(0)] * n
    for i, b in enumerate(basis):
        if b < n:
            x[b] = rhs[i]
    return LPResult(tuple(x), value)
