"""Valuation variants, exact demand oracles, OR composition and a GS certifier."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .core import (
    ItemSet,
    PriceVector,
    check_num_items,
    format_set,
    full_set,
    items_of,
    submasks,
    to_rational,
)


class NonMonotoneValuation(ValueError):
    def __init__(self, smaller: ItemSet, larger: ItemSet, message: str):
        super().__init__(message)
        self.smaller = smaller
        self.larger = larger


def scale_to_integers(tables: Sequence[Sequence[Fraction]]) -> tuple[list[list[int]], int]:
    """Multiply every table by the lcm of all denominators.

    Returns the integer tables and the common denominator, so
    ``Fraction(int_table[s], denom) == table[s]``.
    """
    denom = 1
    for table in tables:
        for x in table:
            denom = math.lcm(denom, x.denominator)
    return [[x.numerator * (denom // x.denominator) for x in table] for table in tables], denom


def _or_levels(tables: Sequence[Sequence[int]], k: int) -> list[list[int]]:
    """Prefix OR tables: ``levels[i][S]`` is the best split of S among children ``0..i``."""
    size = 1 << k
    f = list(tables[0])
    levels = [f]
    for t in tables[1:]:
        g = [0] * size
        for s in range(size):
            best = f[s]
            sub = s
            while sub:
                val = f[s ^ sub] + t[sub]
                if val > best:
                    best = val
                sub = (sub - 1) & s
            g[s] = best
        f = g
        levels.append(f)
    return levels


def or_table(tables: Sequence[Sequence[int]], k: int) -> list[int]:
    """OR-composition of integer value tables over ``k`` items (3^k per child)."""
    return _or_levels(tables, k)[-1]


class Valuation:
    """A monotone set function with ``v(empty) == 0`` over ``num_items`` items.

    Subclasses provide ``num_items`` and ``table``, the value of every subset
    indexed by bitmask.
    """

    num_items: int
    table: Sequence[Fraction]

    def value(self, items: ItemSet) -> Fraction:
        return self.table[items]

    def utility(self, items: ItemSet, p: PriceVector) -> Fraction:
        return self.value(items) - p.total(items)


@dataclass(frozen=True)
class Explicit(Valuation):
    """Full table indexed by bitmask; ``table[0]`` must be 0."""

    num_items: int
    table: tuple[Fraction, ...]

    def __post_init__(self):
        check_num_items(self.num_items)
        table = tuple(to_rational(x) for x in self.table)
        if len(table) != 1 << self.num_items:
            raise ValueError(
                f"explicit table needs {1 << self.num_items} entries, got {len(table)}"
            )
        if table[0] != 0:
            raise ValueError(f"value of the empty set must be 0, got {table[0]}")
        for s in range(len(table)):
            for j in range(self.num_items):
                bit = 1 << j
                if not s & bit and table[s] > table[s | bit]:
                    raise NonMonotoneValuation(
                        s, s | bit,
                        f"not monotone: v({format_set(s)}) = {table[s]} > "
                        f"v({format_set(s | bit)}) = {table[s | bit]}",
                    )
        object.__setattr__(self, "table", table)


def _item_values(values: Iterable) -> tuple[Fraction, ...]:
    out = tuple(to_rational(x) for x in values)
    for j, x in enumerate(out):
        if x < 0:
            raise ValueError(f"value of item {j} is negative: {x}")
    check_num_items(len(out))
    return out


@dataclass(frozen=True)
class UnitDemand(Valuation):
    values: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", _item_values(self.values))

    @property
    def num_items(self) -> int:
        return len(self.values)

    def value(self, items: ItemSet) -> Fraction:
        return max((self.values[j] for j in items_of(items)), default=Fraction(0))

    @cached_property
    def table(self) -> tuple[Fraction, ...]:
        out = [Fraction(0)] * (1 << len(self.values))
        for s in range(1, len(out)):
            low = s & -s
            out[s] = max(out[s ^ low], self.values[low.bit_length() - 1])
        return tuple(out)


@dataclass(frozen=True)
class Additive(Valuation):
    values: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", _item_values(self.values))

    @property
    def num_items(self) -> int:
        return len(self.values)

    def value(self, items: ItemSet) -> Fraction:
        return sum((self.values[j] for j in items_of(items)), Fraction(0))

    @cached_property
    def table(self) -> tuple[Fraction, ...]:
        out = [Fraction(0)] * (1 << len(self.values))
        for s in range(1, len(out)):
            low = s & -s
            out[s] = out[s ^ low] + self.values[low.bit_length() - 1]
        return tuple(out)


@dataclass(frozen=True)
class Or(Valuation):
    """``v(S)`` is the best split of S among the children.

    Leftover items never help a monotone child, so the children's sets are
    allowed to cover S rather than partition a subset of it.
    """

    children: tuple[Valuation, ...]

    def __post_init__(self):
        children = tuple(self.children)
        if not children:
            raise ValueError("OR of an empty list of valuations")
        ks = {c.num_items for c in children}
        if len(ks) != 1:
            raise ValueError(f"OR children disagree on the number of items: {sorted(ks)}")
        object.__setattr__(self, "children", children)

    @property
    def num_items(self) -> int:
        return self.children[0].num_items

    @cached_property
    def _levels(self) -> tuple[list[list[int]], list[list[int]], int]:
        ints, denom = scale_to_integers([c.table for c in self.children])
        return _or_levels(ints, self.num_items), ints, denom

    @cached_property
    def table(self) -> tuple[Fraction, ...]:
        levels, _, denom = self._levels
        return tuple(Fraction(x, denom) for x in levels[-1])

    def split(self, items: ItemSet) -> tuple[ItemSet, ...]:
        """A deterministic optimal split of ``items`` among the children."""
        levels, ints, _ = self._levels
        out = [0] * len(self.children)
        rest = items
        for i in range(len(self.children) - 1, 0, -1):
            target = levels[i][rest]
            for sub in submasks(rest):
                if levels[i - 1][rest ^ sub] + ints[i][sub] == target:
                    out[i] = sub
                    rest ^= sub
                    break
        out[0] = rest
        return tuple(out)


def or_player(valuations: Sequence[Valuation]) -> Or:
    return Or(tuple(valuations))


def duplicate_item(v: Valuation, j: int) -> Valuation:
    """``v`` over one more item: item ``k`` is a perfect substitute for ``j``.

    Holding both copies is worth the same as holding one.
    """
    k = v.num_items
    if not 0 <= j < k:
        raise ValueError(f"item {j} out of range for {k} items")
    if isinstance(v, UnitDemand):
        return UnitDemand(v.values + (v.values[j],))
    table = v.table
    full = full_set(k)
    return Explicit(k + 1, tuple(table[(s & full) | ((s >> k) << j)] for s in range(1 << (k + 1))))


@dataclass(frozen=True)
class DemandResult:
    representative: ItemSet
    max_utility: Fraction


def _check_prices(v: Valuation, p: PriceVector) -> None:
    if len(p) != v.num_items:
        raise ValueError(f"price vector has {len(p)} entries, valuation has {v.num_items} items")


def demand(v: Valuation, p: PriceVector, ground: ItemSet | None = None) -> DemandResult:
    """Utility-maximising subset of ``ground``; ties go to the smallest bitmask."""
    _check_prices(v, p)
    ground = full_set(v.num_items) if ground is None else ground
    table, sums = v.table, p.sums
    best_set, best = 0, None
    for s in submasks(ground):
        u = table[s] - sums[s]
        if best is None or u > best:
            best_set, best = s, u
    return DemandResult(best_set, best)


def demand_all(v: Valuation, p: PriceVector, ground: ItemSet | None = None) -> frozenset[ItemSet]:
    _check_prices(v, p)
    ground = full_set(v.num_items) if ground is None else ground
    table, sums = v.table, p.sums
    utils = {s: table[s] - sums[s] for s in submasks(ground)}
    best = max(utils.values())
    return frozenset(s for s, u in utils.items() if u == best)


def max_utility(v: Valuation, p: PriceVector, ground: ItemSet | None = None) -> Fraction:
    return demand(v, p, ground).max_utility


# -- gross substitutes -------------------------------------------------------

@dataclass(frozen=True)
class GSWitness:
    """Prices ``p1 <= p2`` and ``d1`` in the demand at ``p1`` such that no set
    demanded at ``p2`` keeps every item of ``d1`` whose price did not move."""

    p1: PriceVector
    p2: PriceVector
    d1: ItemSet

    def holds_for(self, v: Valuation) -> bool:
        if not self.p1 <= self.p2 or self.d1 not in demand_all(v, self.p1):
            return False
        keep = 0
        for j in items_of(self.d1):
            if self.p1[j] == self.p2[j]:
                keep |= 1 << j
        return not any(d & keep == keep for d in demand_all(v, self.p2))


@dataclass(frozen=True)
class GSCheck:
    is_gs: bool
    witness: GSWitness | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.is_gs


def _local_prices(k: int, base: ItemSet, local: dict[int, Fraction], high: Fraction) -> PriceVector:
    prices = []
    for j in range(k):
        if j in local:
            prices.append(local[j])
        elif base >> j & 1:
            prices.append(Fraction(0))
        else:
            prices.append(high)
    return PriceVector(tuple(prices))


def _pair_witness(v, s, i, j, high) -> GSWitness:
    t = v.table
    a = t[s | 1 << i] - t[s]
    b = t[s | 1 << j] - t[s]
    c = t[s | 1 << i | 1 << j] - t[s]
    delta = (c - a - b) / 3
    p1 = _local_prices(v.num_items, s, {i: a + delta, j: c - a - delta}, high)
    return GSWitness(p1, p1.replace(j, p1[j] + delta), s | 1 << i | 1 << j)


def _triple_witness(v, s, i, j, l, high) -> GSWitness | None:
    # w(ij) + w(l) is the unique max of the three pair+singleton splits: price
    # {i,j} and {l} to tie at the top, then nudge j up so only sets without i remain.
    t = v.table

    def w(*items):
        m = s
        for x in items:
            m |= 1 << x
        return t[m] - t[s]

    slack_a = w(i, j) + w(l) - w(i, j, l)
    slack_b = w(i, j) + 2 * w(l) - w(j, l) - w(i, l)
    u = min(slack_a, slack_b, w(l)) / 2
    if u <= 0:
        return None
    lo = max(w(i) - u, w(i, l) - w(l))
    hi = min(w(i, j) - w(j), w(i, j) + w(l) - w(j, l) - u, w(i, j) - u)
    floor = max(lo, Fraction(0))
    if hi > floor:
        p_i = (floor + hi) / 2
    elif lo < 0 <= hi:
        p_i = Fraction(0)
    else:
        return None
    p_j = w(i, j) - u - p_i
    local = {i: p_i, j: p_j, l: w(l) - u}
    if min(local.values()) < 0:
        return None
    p1 = _local_prices(v.num_items, s, local, high)
    eps = min(u, Fraction(1)) / 2
    return GSWitness(p1, p1.replace(j, p_j + eps), s | 1 << i | 1 << j)


def _local_grid_witness(v, s, local_items, high) -> GSWitness | None:
    t = v.table
    vals = sorted({t[s | sub] - t[s] for sub in submasks(_mask(local_items))})
    diffs = sorted({abs(x - y) for x in vals for y in vals})
    grid = sorted(set(diffs) | {(x + y) / 2 for x, y in zip(diffs, diffs[1:])})
    for combo in itertools.product(grid, repeat=len(local_items)):
        p1 = _local_prices(v.num_items, s, dict(zip(local_items, combo)), high)
        for idx, j in enumerate(local_items):
            bumps = [g for g in grid if g > combo[idx]] or [combo[idx] + 1]
            for g in bumps[:2]:
                p2 = p1.replace(j, g)
                for d1 in demand_all(v, p1):
                    wit = GSWitness(p1, p2, d1)
                    if wit.holds_for(v):
                        return wit
    return None


def _mask(items) -> ItemSet:
    m = 0
    for j in items:
        m |= 1 << j
    return m


def is_gross_substitutes(v: Valuation) -> GSCheck:
    """Certify GS through local exchange conditions on the value table.

    Submodularity plus: for every S and distinct i, j, l outside S the largest
    of v(S+ij)+v(S+l), v(S+il)+v(S+j), v(S+jl)+v(S+i) is attained twice.
    On failure a price-pair witness against the definition is returned.
    """
    k = v.num_items
    t = v.table
    high = t[full_set(k)] + 1
    for s in range(1 << k):
        outside = [j for j in range(k) if not s >> j & 1]
        for i, j in itertools.combinations(outside, 2):
            if t[s | 1 << i | 1 << j] + t[s] > t[s | 1 << i] + t[s | 1 << j]:
                wit = _pair_witness(v, s, i, j, high)
                if not wit.holds_for(v):
                    wit = _local_grid_witness(v, s, [i, j], high)
                return GSCheck(False, wit, f"items {i},{j} are complements given {format_set(s)}")
    for s in range(1 << k):
        outside = [j for j in range(k) if not s >> j & 1]
        for trio in itertools.combinations(outside, 3):
            for i, j, l in ((trio[0], trio[1], trio[2]), (trio[0], trio[2], trio[1]), (trio[1], trio[2], trio[0])):
                lhs = t[s | 1 << i | 1 << j] + t[s | 1 << l]
                alt1 = t[s | 1 << i | 1 << l] + t[s | 1 << j]
                alt2 = t[s | 1 << j | 1 << l] + t[s | 1 << i]
                if lhs > max(alt1, alt2):
                    wit = _triple_witness(v, s, i, j, l, high)
                    if wit is None or not wit.holds_for(v):
                        wit = _local_grid_witness(v, s, [i, j, l], high)
                    return GSCheck(
                        False, wit,
                        f"triple condition fails for {i},{j} vs {l} given {format_set(s)}",
                    )
    return GSCheck(True)


def candidate_price_grid(v: Valuation) -> list[Fraction]:
    """Pairwise value differences, their midpoints, and one price above every value."""
    vals = sorted(set(v.table))
    diffs = sorted({abs(x - y) for x in vals for y in vals})
    grid = set(diffs) | {(x + y) / 2 for x, y in zip(diffs, diffs[1:])}
    grid.add(vals[-1] + 1)
    return sorted(grid)


def find_gs_violation_on_grid(v: Valuation, grid: Sequence[Fraction] | None = None) -> GSWitness | None:
    """Search the definition of GS directly over price pairs drawn from ``grid``.

    Exponential in the number of items; meant for cross-checking the
    certifier on two- or three-item valuations.
    """
    grid = candidate_price_grid(v) if grid is None else sorted(set(grid))
    k = v.num_items
    for combo in itertools.product(grid, repeat=k):
        p1 = PriceVector(combo)
        d1s = demand_all(v, p1)
        higher = [[g for g in grid if g >= x] for x in combo]
        for combo2 in itertools.product(*higher):
            if combo2 == combo:
                continue
            p2 = PriceVector(combo2)
            for d1 in d1s:
                wit = GSWitness(p1, p2, d1)
                if wit.holds_for(v):
                    return wit
    return None
