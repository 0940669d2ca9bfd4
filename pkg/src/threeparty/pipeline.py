"""Central auction over mediators, local auctions, and certificate checking."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .core import (
    Allocation,
    Instance,
    NoEquilibrium,
    PriceVector,
    format_set,
    items_of,
    pointwise_max,
)
from .mediator import REJECTED, EFMediator
from .valuations import Or, demand_all
from .walrasian import solve_we

REQUIREMENTS = ("R1", "R2", "R3", "R4", "revenue")

REQUIREMENT_TEXT = {
    "R1": "each mediator's set is in the mediator's demand at the central prices",
    "R2": "every item with a positive central price is sold to a mediator",
    "R3": "local prices equal central prices off the mediator's set",
    "R4": "each bidder gets a demanded subset of the mediator's set at local prices",
    "revenue": "reported revenues match local prices and central prices",
}


@dataclass(frozen=True)
class EquilibriumCertificate:
    central_prices: PriceVector
    mediator_allocation: Allocation
    local_prices: tuple[PriceVector, ...]
    bidder_allocation: Allocation
    revenues: tuple[Fraction, ...]


@dataclass(frozen=True)
class RequirementVerdict:
    name: str
    passed: bool
    witnesses: tuple[str, ...] = ()


@dataclass(frozen=True)
class EquilibriumVerdict:
    requirements: tuple[RequirementVerdict, ...]

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.requirements)

    def __getitem__(self, name: str) -> RequirementVerdict:
        for v in self.requirements:
            if v.name == name:
                return v
        raise KeyError(name)

    @property
    def failed(self) -> list[str]:
        return [v.name for v in self.requirements if not v.passed]


@dataclass(frozen=True)
class MinPriceVerdict:
    passed: bool
    local_max: PriceVector
    bidder_min: PriceVector
    mismatched_items: tuple[int, ...] = field(default=())


def mediator_valuations(instance: Instance) -> list[Or]:
    vals = instance.valuations
    return [Or(tuple(vals[b] for b in instance.members(i))) for i in range(len(instance.mediators))]


def _mediators(instance: Instance) -> list[EFMediator]:
    vals = instance.valuations
    return [
        EFMediator([vals[b] for b in instance.members(i)], instance.num_items)
        for i in range(len(instance.mediators))
    ]


def _map_workers(fn, args, threads: int):
    if threads <= 1 or len(args) <= 1:
        return [fn(a) for a in args]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, args))


def solve_three_party(
    instance: Instance,
    central_prices: str = "min",
    threads: int = 1,
    validate: bool = True,
) -> EquilibriumCertificate:
    """Central Walrasian auction among OR-players, then one local auction per mediator.

    ``central_prices`` may be ``"max"`` for experiments; the minimum-price
    relation only holds for ``"min"``.
    """
    k = instance.num_items
    we = solve_we(instance.all_items, mediator_valuations(instance), k, central_prices)
    r = we.prices
    meds = _mediators(instance)

    def local(i: int):
        return meds[i].virtual_auction(we.allocation[i], r)

    outcomes = _map_workers(local, list(range(len(meds))), threads)
    bundles = [0] * len(instance.bidders)
    for i, out in enumerate(outcomes):
        if out.rejected:
            raise NoEquilibrium(
                f"local auction of mediator {instance.mediators[i][0]} on "
                f"{format_set(we.allocation[i])} fails the global envy check"
            )
        for b, s in zip(instance.members(i), out.allocation):
            bundles[b] = s
    cert = EquilibriumCertificate(
        r,
        we.allocation,
        tuple(out.prices for out in outcomes),
        Allocation(tuple(bundles)),
        tuple(out.revenue for out in outcomes),
    )
    if validate:
        verdict = check_equilibrium(instance, cert)
        if not verdict.passed:
            raise NoEquilibrium(f"assembled certificate fails {', '.join(verdict.failed)}")
    return cert


def _check_shapes(instance: Instance, cert: EquilibriumCertificate) -> None:
    k, m, n = instance.num_items, len(instance.mediators), len(instance.bidders)
    if len(cert.central_prices) != k:
        raise ValueError(f"central prices have {len(cert.central_prices)} entries, instance has {k} items")
    if len(cert.local_prices) != m or len(cert.mediator_allocation) != m or len(cert.revenues) != m:
        raise ValueError(f"certificate does not describe {m} mediators")
    for p in cert.local_prices:
        if len(p) != k:
            raise ValueError(f"local prices have {len(p)} entries, instance has {k} items")
    if len(cert.bidder_allocation) != n:
        raise ValueError(f"certificate does not describe {n} bidders")
    full = instance.all_items
    for s in list(cert.mediator_allocation) + list(cert.bidder_allocation):
        if s & ~full:
            raise ValueError("certificate allocates items the instance does not have")


def check_equilibrium(instance: Instance, cert: EquilibriumCertificate) -> EquilibriumVerdict:
    """Evaluate the four equilibrium requirements and revenue bookkeeping separately."""
    _check_shapes(instance, cert)
    r = cert.central_prices
    vals = instance.valuations
    bids = instance.bidder_ids
    mids = instance.mediator_ids
    meds = _mediators(instance)
    out: dict[str, list[str]] = {name: [] for name in REQUIREMENTS}

    for i, med in enumerate(meds):
        omega_i = cert.mediator_allocation[i]
        fam = med.demand_bruteforce(r)
        if omega_i not in fam:
            got = med.virtual_auction(omega_i, r).revenue
            best = med.virtual_auction(min(fam), r).revenue if fam else None
            out["R1"].append(
                f"mediator {mids[i]}: {format_set(omega_i)} has revenue {got}, "
                f"but {format_set(min(fam)) if fam else 'nothing'} gives {best}"
            )

    sold = cert.mediator_allocation.allocated
    for j in range(instance.num_items):
        if r[j] != 0 and not sold >> j & 1:
            out["R2"].append(f"item {j} has central price {r[j]} but no mediator holds it")

    for i in range(len(meds)):
        p = cert.local_prices[i]
        omega_i = cert.mediator_allocation[i]
        for j in range(instance.num_items):
            if not omega_i >> j & 1 and p[j] != r[j]:
                out["R3"].append(f"mediator {mids[i]}: item {j} is priced {p[j]} locally and {r[j]} centrally")

    for i in range(len(meds)):
        p = cert.local_prices[i]
        omega_i = cert.mediator_allocation[i]
        for b in instance.members(i):
            have = cert.bidder_allocation[b]
            if have & ~omega_i:
                out["R4"].append(
                    f"bidder {bids[b]} holds {format_set(have)} outside mediator {mids[i]}'s set {format_set(omega_i)}"
                )
                continue
            dem = demand_all(vals[b], p)
            if have not in dem:
                better = min(dem)
                out["R4"].append(
                    f"bidder {bids[b]} holds {format_set(have)} with utility {vals[b].utility(have, p)} "
                    f"but {format_set(better)} gives {vals[b].utility(better, p)}"
                )

    for i in range(len(meds)):
        p = cert.local_prices[i]
        omega_i = cert.mediator_allocation[i]
        expect = sum((p.total(cert.bidder_allocation[b]) for b in instance.members(i)), Fraction(0)) - r.total(omega_i)
        got = cert.revenues[i]
        if got is REJECTED or got != expect:
            out["revenue"].append(f"mediator {mids[i]} reports revenue {got}, prices give {expect}")

    return EquilibriumVerdict(tuple(RequirementVerdict(n, not w, tuple(w)) for n, w in out.items()))


def trivial_equilibrium_from_we(instance: Instance, validate: bool = True) -> EquilibriumCertificate:
    """Every price vector equals the bidder-level minimum Walrasian prices; revenues are zero."""
    k = instance.num_items
    we = solve_we(instance.all_items, instance.valuations, k)
    med_sets = []
    for i in range(len(instance.mediators)):
        s = 0
        for b in instance.members(i):
            s |= we.allocation[b]
        med_sets.append(s)
    m = len(instance.mediators)
    cert = EquilibriumCertificate(
        we.prices,
        Allocation(tuple(med_sets)),
        (we.prices,) * m,
        we.allocation,
        (Fraction(0),) * m,
    )
    if validate:
        verdict = check_equilibrium(instance, cert)
        if not verdict.passed:
            raise NoEquilibrium(f"trivial certificate fails {', '.join(verdict.failed)}")
    return cert


def max_local_prices(cert: EquilibriumCertificate) -> PriceVector:
    out = cert.local_prices[0]
    for p in cert.local_prices[1:]:
        out = pointwise_max(out, p)
    return out


def check_min_price_relation(instance: Instance, cert: EquilibriumCertificate | None = None) -> MinPriceVerdict:
    """Componentwise max of local prices against bidder-level minimum Walrasian prices."""
    if cert is None:
        cert = solve_three_party(instance)
    q = solve_we(instance.all_items, instance.valuations, instance.num_items).prices
    top = max_local_prices(cert)
    bad = tuple(j for j in range(instance.num_items) if top[j] != q[j])
    return MinPriceVerdict(not bad, top, q, bad)


def bidder_utilities(instance: Instance, cert: EquilibriumCertificate) -> list[Fraction]:
    out = [Fraction(0)] * len(instance.bidders)
    vals = instance.valuations
    for i in range(len(instance.mediators)):
        for b in instance.members(i):
            out[b] = vals[b].utility(cert.bidder_allocation[b], cert.local_prices[i])
    return out


def _groups(items: Sequence, fanout: int) -> list[list]:
    g = -(-len(items) // fanout)
    size, extra = divmod(len(items), g)
    out, start = [], 0
    for x in range(g):
        end = start + size + (1 if x < extra else 0)
        out.append(list(items[start:end]))
        start = end
    return out


def build_mediator_hierarchy(instance: Instance, depth: int, fanout: int = 2) -> Instance:
    """Merge mediators into balanced groups, ``depth - 1`` times.

    A super-mediator's OR valuation is the OR of its children's, which is
    the OR over the pooled bidders, so the result is again a one-level
    instance whose mediators own the pooled bidder lists.
    """
    if depth < 1:
        raise ValueError(f"depth must be at least 1, got {depth}")
    if fanout < 2:
        raise ValueError(f"fanout must be at least 2, got {fanout}")
    meds = list(instance.mediators)
    for _ in range(depth - 1):
        if len(meds) == 1:
            break
        meds = [
            ("+".join(mid for mid, _ in group), tuple(b for _, members in group for b in members))
            for group in _groups(meds, fanout)
        ]
    return Instance(instance.num_items, instance.bidders, tuple(meds))


def welfare_of_certificate(instance: Instance, cert: EquilibriumCertificate) -> Fraction:
    vals = instance.valuations
    return sum((vals[b].value(s) for b, s in enumerate(cert.bidder_allocation)), Fraction(0))


def seller_revenue(cert: EquilibriumCertificate) -> Fraction:
    return cert.central_prices.total(cert.mediator_allocation.allocated)


def unsold_items(cert: EquilibriumCertificate, num_items: int) -> list[int]:
    return items_of(((1 << num_items) - 1) & ~cert.mediator_allocation.allocated)
