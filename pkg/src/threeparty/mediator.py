"""EF-mediators: virtual auctions, revenue, demand, and the OR-player comparison."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .core import (
    Allocation,
    EquivalenceViolation,
    ItemSet,
    PriceVector,
    format_set,
    full_set,
    items_of,
)
from .reserves import ReservePrices, WerpPriceOracle
from .valuations import Explicit, Or, Valuation, demand_all, is_gross_substitutes


class _Rejected:
    """Revenue of a set whose virtual auction fails the global envy check."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "REJECTED"

    def __reduce__(self):
        return (_Rejected, ())


REJECTED = _Rejected()


def is_rejected(revenue) -> bool:
    return revenue is REJECTED


@dataclass(frozen=True)
class VirtualAuctionOutcome:
    offered: ItemSet
    prices: PriceVector
    allocation: Allocation
    revenue: object
    flagged: bool = False

    @property
    def rejected(self) -> bool:
        return self.revenue is REJECTED

    @property
    def allocated(self) -> ItemSet:
        return self.allocation.allocated


@dataclass(frozen=True)
class MediatorDemand:
    representative: ItemSet
    revenue: Fraction
    local_outcome: VirtualAuctionOutcome


def _subsets(ground: ItemSet) -> list[ItemSet]:
    out = []
    sub = ground
    while True:
        out.append(sub)
        if sub == 0:
            break
        sub = (sub - 1) & ground
    out.reverse()
    return out


def _sums(prices: Sequence[int]) -> list[int]:
    out = [0] * (1 << len(prices))
    for s in range(1, len(out)):
        low = s & -s
        out[s] = out[s ^ low] + prices[low.bit_length() - 1]
    return out


class EFMediator:
    """One mediator's bidders over ``num_items`` items.

    Price oracles and virtual-auction outcomes are cached per reserve vector,
    so sweeping all subsets at one ``r`` builds the welfare tables once.
    """

    def __init__(self, valuations: Sequence[Valuation], num_items: int | None = None):
        self.valuations = list(valuations)
        if num_items is None:
            if not self.valuations:
                raise ValueError("num_items is required for a mediator without bidders")
            num_items = self.valuations[0].num_items
        self.num_items = num_items
        self._oracles: dict[PriceVector, WerpPriceOracle] = {}
        self._outcomes: dict[tuple[PriceVector, ItemSet], VirtualAuctionOutcome] = {}

    def oracle(self, r: ReservePrices) -> WerpPriceOracle:
        o = self._oracles.get(r)
        if o is None:
            o = self._oracles[r] = WerpPriceOracle(self.valuations, r, self.num_items)
        return o

    def virtual_auction(self, offered: ItemSet, r: ReservePrices) -> VirtualAuctionOutcome:
        key = (r, offered)
        out = self._outcomes.get(key)
        if out is None:
            out = self._outcomes[key] = self._run(offered, r)
        return out

    def _run(self, offered: ItemSet, r: ReservePrices) -> VirtualAuctionOutcome:
        o = self.oracle(r)
        k = self.num_items
        p = o.min_prices_int(offered)
        sums = _sums(p)
        rint = o.reserve_ints
        must = 0
        for j in items_of(offered):
            if p[j] > rint[j]:
                must |= 1 << j
        ground_sets = _subsets(offered)
        families = []
        for t in o.ints:
            utils = [(t[s] - sums[s], s) for s in ground_sets]
            best = max(u for u, _ in utils)
            families.append([s for u, s in utils if u == best])

        # among envy-free allocations that sell every item priced above reserve,
        # keep the first one found with the largest total price
        best_alloc: list[ItemSet] | None = None
        best_total = -1
        chosen: list[ItemSet] = []

        def rec(b: int, used: ItemSet) -> None:
            nonlocal best_alloc, best_total
            if b == len(families):
                if used & must == must and sums[used] > best_total:
                    best_total = sums[used]
                    best_alloc = list(chosen)
                return
            for d in families[b]:
                if not d & used:
                    chosen.append(d)
                    rec(b + 1, used | d)
                    chosen.pop()

        rec(0, 0)
        prices = o.to_prices(p)
        if best_alloc is None:
            return VirtualAuctionOutcome(offered, prices, Allocation.empty(len(o.ints)), REJECTED, True)
        everything = full_set(k)
        for t, s in zip(o.ints, best_alloc):
            have = t[s] - sums[s]
            if any(t[x] - sums[x] > have for x in range(everything + 1)):
                return VirtualAuctionOutcome(offered, prices, Allocation(tuple(best_alloc)), REJECTED)
        revenue = Fraction(best_total - o.reserve_table[offered], o.denom)
        return VirtualAuctionOutcome(offered, prices, Allocation(tuple(best_alloc)), revenue)

    def demand(self, r: ReservePrices) -> MediatorDemand:
        """The auction on every item; its sold set is a demanded set."""
        out = self.virtual_auction(full_set(self.num_items), r)
        if out.rejected:
            raise EquivalenceViolation("virtual auction on all items was rejected", full_set(self.num_items))
        local = self.virtual_auction(out.allocated, r)
        if local.rejected:
            raise EquivalenceViolation(f"sold set {format_set(out.allocated)} is rejected on its own", out.allocated)
        return MediatorDemand(out.allocated, local.revenue, local)

    def revenue_profile(self, r: ReservePrices) -> dict[ItemSet, object]:
        return {s: self.virtual_auction(s, r).revenue for s in range(1 << self.num_items)}

    def demand_bruteforce(self, r: ReservePrices) -> frozenset[ItemSet]:
        profile = self.revenue_profile(r)
        values = [x for x in profile.values() if x is not REJECTED]
        if not values:
            return frozenset()
        best = max(values)
        return frozenset(s for s, x in profile.items() if x is not REJECTED and x == best)

    def or_valuation(self) -> Valuation:
        if self.valuations:
            return Or(tuple(self.valuations))
        return Explicit(self.num_items, (0,) * (1 << self.num_items))


def _mediator(valuations, num_items) -> EFMediator:
    if isinstance(valuations, EFMediator):
        return valuations
    return EFMediator(valuations, num_items)


def virtual_auction(valuations, offered: ItemSet, r: ReservePrices, num_items: int | None = None) -> VirtualAuctionOutcome:
    return _mediator(valuations, num_items if num_items is not None else len(r)).virtual_auction(offered, r)


def mediator_demand(valuations, r: ReservePrices, num_items: int | None = None) -> MediatorDemand:
    return _mediator(valuations, num_items if num_items is not None else len(r)).demand(r)


def mediator_demand_bruteforce(valuations, r: ReservePrices, num_items: int | None = None) -> frozenset[ItemSet]:
    return _mediator(valuations, num_items if num_items is not None else len(r)).demand_bruteforce(r)


def or_player_demand(valuations, r: ReservePrices, num_items: int | None = None) -> frozenset[ItemSet]:
    med = _mediator(valuations, num_items if num_items is not None else len(r))
    return demand_all(med.or_valuation(), r)


@dataclass(frozen=True)
class OrEquivalenceReport:
    passed: bool
    gs_input: bool
    mediator_family: frozenset[ItemSet]
    or_family: frozenset[ItemSet]
    problems: tuple[str, ...] = field(default=())
    witness: ItemSet | None = None


def check_or_equivalence(valuations, r: ReservePrices, num_items: int | None = None, gs: bool | None = None) -> OrEquivalenceReport:
    """Compare the mediator's demand family with the OR-player's, and check that
    each demanded set's virtual allocation is welfare-optimal for the OR-player.

    Raises EquivalenceViolation on a mismatch for gross-substitutes bidders;
    for other bidders the mismatch is only reported.
    """
    med = _mediator(valuations, num_items if num_items is not None else len(r))
    if gs is None:
        gs = all(is_gross_substitutes(v).is_gs for v in med.valuations)
    fam = med.demand_bruteforce(r)
    or_v = med.or_valuation()
    or_fam = demand_all(or_v, r)
    problems = []
    witness = None
    for s in sorted(fam ^ or_fam):
        side = "mediator" if s in fam else "OR-player"
        problems.append(f"{format_set(s)} is demanded only by the {side}")
        witness = s if witness is None else witness
    for s in sorted(fam):
        out = med.virtual_auction(s, r)
        w = sum((v.value(x) for v, x in zip(med.valuations, out.allocation)), Fraction(0))
        if w != or_v.value(s):
            problems.append(f"virtual allocation on {format_set(s)} has welfare {w}, OR value {or_v.value(s)}")
            witness = s if witness is None else witness
    report = OrEquivalenceReport(not problems, gs, fam, or_fam, tuple(problems), witness)
    if problems and gs:
        raise EquivalenceViolation("; ".join(problems), witness)
    return report
