"""Welfare maximisation, Walrasian equilibria and extreme Walrasian prices.

Minimum prices come from the duplicate-item scheme: adding a second, perfectly
substitutable copy of item ``j`` raises optimal welfare by exactly the least
Walrasian price of ``j``. Maximum prices are the marginal welfare loss from
removing ``j``. Both are read off OR-composition tables, so one table build
prices every ground set at once.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import (
    Allocation,
    ItemSet,
    NoWalrasianEquilibrium,
    OracleDisagreement,
    PriceVector,
    full_set,
    items_of,
)
from .valuations import Valuation, or_table, scale_to_integers


@dataclass(frozen=True)
class WelfareSolution:
    allocation: Allocation
    welfare: Fraction


@dataclass(frozen=True)
class WalrasianEquilibrium:
    allocation: Allocation
    prices: PriceVector


def infer_num_items(items: ItemSet, valuations: Sequence[Valuation], num_items: int | None = None) -> int:
    if num_items is not None:
        k = num_items
    elif valuations:
        k = valuations[0].num_items
    else:
        k = items.bit_length()
    for v in valuations:
        if v.num_items != k:
            raise ValueError(f"valuation is over {v.num_items} items, expected {k}")
    if items >> k:
        raise ValueError(f"item set has items beyond the {k} items of the economy")
    return k


class PriceOracle:
    """Integer-scaled welfare tables for a fixed bidder list and reserve vector.

    The reserve vector enters as an extra additive bidder (all-zero reserves
    leave welfare and Walrasian prices unchanged). Every quantity is an
    integer multiple of ``1 / denom``.
    """

    def __init__(self, valuations: Sequence[Valuation], num_items: int, reserves: PriceVector | None = None):
        self.num_items = k = num_items
        self.n = len(valuations)
        r = reserves if reserves is not None else PriceVector.zeros(k)
        if len(r) != k:
            raise ValueError(f"reserve vector has {len(r)} entries, expected {k}")
        self.reserves = r
        tables = [v.table for v in valuations]
        ints, self.denom = scale_to_integers(tables + [r.sums])
        self.ints = ints[:-1]
        self.reserve_table = ints[-1]
        self.reserve_ints = [ints[-1][1 << j] for j in range(k)]
        self._children = self.ints + [self.reserve_table]
        self.base = or_table(self._children, k)
        self._dup: dict[int, list[int]] = {}

    def _duplicate_table(self, j: int) -> list[int]:
        dp = self._dup.get(j)
        if dp is None:
            k = self.num_items
            full = full_set(k)
            proj = [(s & full) | ((s >> k) << j) for s in range(1 << (k + 1))]
            dup = [[t[x] for x in proj] for t in self._children]
            dp = self._dup[j] = or_table(dup, k + 1)
        return dp

    def welfare_int(self, ground: ItemSet) -> int:
        return self.base[ground]

    def welfare(self, ground: ItemSet) -> Fraction:
        return Fraction(self.base[ground], self.denom)

    def min_prices_int(self, ground: ItemSet) -> list[int]:
        k = self.num_items
        out = list(self.reserve_ints)
        copy = 1 << k
        for j in items_of(ground):
            dp = self._duplicate_table(j)
            out[j] = max(dp[ground | copy] - dp[ground], out[j])
        return out

    def max_prices_int(self, ground: ItemSet) -> list[int]:
        out = list(self.reserve_ints)
        for j in items_of(ground):
            out[j] = max(self.base[ground] - self.base[ground ^ (1 << j)], out[j])
        return out

    def to_prices(self, ints: Sequence[int]) -> PriceVector:
        return PriceVector(tuple(Fraction(x, self.denom) for x in ints))

    def min_prices(self, ground: ItemSet) -> PriceVector:
        return self.to_prices(self.min_prices_int(ground))

    def max_prices(self, ground: ItemSet) -> PriceVector:
        return self.to_prices(self.max_prices_int(ground))


def _max_marginals(tables: Sequence[Sequence[int]], items: list[int]) -> list[int]:
    out = []
    for j in items:
        bit = 1 << j
        best = 0
        for t in tables:
            for s in range(len(t)):
                if not s & bit:
                    d = t[s | bit] - t[s]
                    if d > best:
                        best = d
        out.append(best)
    return out


def _lexmin_optimal(tables: Sequence[Sequence[int]], items: list[int], target: int) -> list[int]:
    """Branch and bound for the lexicographically least assignment reaching ``target``.

    Choices per item are tried in the order unallocated, bidder 0, bidder 1, ...
    """
    n = len(tables)
    marg = _max_marginals(tables, items)
    suffix = [0] * (len(items) + 1)
    for idx in range(len(items) - 1, -1, -1):
        suffix[idx] = suffix[idx + 1] + marg[idx]
    bundles = [0] * n
    vals = [0] * n
    assign: list[int] = []

    def rec(idx: int, cur: int) -> bool:
        if idx == len(items):
            if cur > target:
                raise OracleDisagreement(f"search found welfare {cur} above the OR optimum {target}")
            return cur == target
        if cur + suffix[idx] < target:
            return False
        bit = 1 << items[idx]
        assign.append(-1)
        if rec(idx + 1, cur):
            return True
        assign.pop()
        for b in range(n):
            old = vals[b]
            nb = bundles[b] | bit
            nv = tables[b][nb]
            bundles[b], vals[b] = nb, nv
            assign.append(b)
            if rec(idx + 1, cur - old + nv):
                return True
            assign.pop()
            bundles[b] ^= bit
            vals[b] = old
        return False

    if not rec(0, 0):
        raise OracleDisagreement(f"no assignment reaches the OR optimum {target}")
    return assign


def max_welfare(items: ItemSet, valuations: Sequence[Valuation], num_items: int | None = None) -> WelfareSolution:
    """Exact welfare-maximising allocation of ``items``.

    The optimum value comes from the OR table; branch and bound with the
    per-item max-marginal bound then finds the lexicographically least
    assignment vector attaining it.
    """
    k = infer_num_items(items, valuations, num_items)
    n = len(valuations)
    if not n or not items:
        return WelfareSolution(Allocation.empty(n), Fraction(0))
    ints, denom = scale_to_integers([v.table for v in valuations])
    target = or_table(ints, k)[items]
    item_list = items_of(items)
    assign = _lexmin_optimal(ints, item_list, target)
    bundles = [0] * n
    for j, b in zip(item_list, assign):
        if b >= 0:
            bundles[b] |= 1 << j
    return WelfareSolution(Allocation(tuple(bundles)), Fraction(target, denom))


def _envy_witness(valuations, allocation, p: PriceVector, ground: ItemSet) -> str | None:
    sums = p.sums
    for b, v in enumerate(valuations):
        t = v.table
        have = t[allocation[b]] - sums[allocation[b]]
        for s in _subsets(ground):
            if t[s] - sums[s] > have:
                return f"bidder {b} prefers {items_of(s)} to {items_of(allocation[b])}"
    return None


def _subsets(ground: ItemSet):
    sub = ground
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & ground


def solve_we(
    items: ItemSet,
    valuations: Sequence[Valuation],
    num_items: int | None = None,
    prices: str = "min",
) -> WalrasianEquilibrium:
    """Welfare-maximising allocation paired with minimum (or maximum) Walrasian prices.

    Items outside ``items`` carry price 0. For gross substitutes the prices
    come from the duplicate-item formula. If those fail to support the
    allocation, the valuations are not gross substitutes, and the exact
    price LP decides: it returns a vertex minimising (or maximising) the
    total price, or NoWalrasianEquilibrium when no supporting price exists.
    """
    if prices not in ("min", "max"):
        raise ValueError(f"prices must be 'min' or 'max', got {prices!r}")
    k = infer_num_items(items, valuations, num_items)
    sol = max_welfare(items, valuations, k)
    oracle = PriceOracle(valuations, k)
    p = oracle.min_prices(items) if prices == "min" else oracle.max_prices(items)
    unsold = items & ~sol.allocation.allocated
    why = next((f"unallocated item {j} would be priced {p[j]}" for j in items_of(unsold) if p[j] != 0), None)
    if why is None:
        why = _envy_witness(valuations, sol.allocation, p, items)
    if why is None:
        return WalrasianEquilibrium(sol.allocation, p)
    # every Walrasian price supports every welfare-maximising allocation,
    # so the LP on this one settles existence
    from .lp import Infeasible
    from .verify import price_polytope_optimum

    sign = 1 if prices == "min" else -1
    try:
        q = price_polytope_optimum(items, valuations, sol.allocation, PriceVector.zeros(k), [sign] * k, k)
    except Infeasible:
        raise NoWalrasianEquilibrium(f"no prices support a welfare-maximising allocation ({why})") from None
    return WalrasianEquilibrium(sol.allocation, q)


def min_walrasian_prices(items: ItemSet, valuations: Sequence[Valuation], num_items: int | None = None) -> PriceVector:
    return solve_we(items, valuations, num_items, "min").prices


def max_walrasian_prices(items: ItemSet, valuations: Sequence[Valuation], num_items: int | None = None) -> PriceVector:
    return solve_we(items, valuations, num_items, "max").prices


def welfare_of(valuations: Sequence[Valuation], allocation: Allocation) -> Fraction:
    return sum((v.value(s) for v, s in zip(valuations, allocation)), Fraction(0))


__all__ = [
    "WelfareSolution",
    "WalrasianEquilibrium",
    "PriceOracle",
    "max_welfare",
    "solve_we",
    "min_walrasian_prices",
    "max_walrasian_prices",
    "welfare_of",
]
