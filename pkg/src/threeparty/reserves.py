"""Walrasian equilibria with reserve prices via an appended additive bidder."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .core import (
    Allocation,
    Instance,
    ItemSet,
    LatticeViolation,
    NoWalrasianEquilibrium,
    NoWerpEquilibrium,
    PriceVector,
    items_of,
    pointwise_max,
    pointwise_min,
)
from .valuations import Additive, Valuation
from .verify import check_envy_free, is_werp_price
from .walrasian import PriceOracle, WalrasianEquilibrium, infer_num_items, max_welfare, solve_we

ReservePrices = PriceVector

RESERVE_BIDDER_ID = "__reserve__"


@dataclass(frozen=True)
class WerpEquilibrium:
    allocation: Allocation
    prices: PriceVector


def augment_with_additive_player(valuations: Sequence[Valuation], r: ReservePrices) -> list[Valuation]:
    """The bidders plus one additive bidder valuing item ``j`` at ``r_j``."""
    return list(valuations) + [Additive(tuple(r))]


def _check_reserves(k: int, r: ReservePrices) -> None:
    if len(r) != k:
        raise ValueError(f"reserve vector has {len(r)} entries, expected {k}")


def werp_from_augmented(we: WalrasianEquilibrium, r: ReservePrices, ground: ItemSet) -> WerpEquilibrium:
    """Drop the additive bidder: its items become unsold, prices become ``max(p', r)``."""
    bundles = we.allocation.bundles[:-1]
    prices = list(pointwise_max(we.prices, r))
    for j in range(len(r)):
        if not ground >> j & 1:
            prices[j] = r[j]
    return WerpEquilibrium(Allocation(bundles), PriceVector(tuple(prices)))


def augmented_from_werp(eq: WerpEquilibrium, r: ReservePrices, ground: ItemSet) -> WalrasianEquilibrium:
    """Hand every unsold ground item to the additive bidder; prices unchanged on ``ground``."""
    unsold = ground & ~eq.allocation.allocated
    prices = [eq.prices[j] if ground >> j & 1 else 0 for j in range(len(r))]
    return WalrasianEquilibrium(Allocation(eq.allocation.bundles + (unsold,)), PriceVector(tuple(prices)))


def is_werp(valuations: Sequence[Valuation], eq: WerpEquilibrium, r: ReservePrices, ground: ItemSet) -> bool:
    p = eq.prices
    if not p >= r:
        return False
    for j in items_of(ground & ~eq.allocation.allocated):
        if p[j] != r[j]:
            return False
    return check_envy_free(valuations, eq.allocation, p, ground).ok


def solve_werp(
    items: ItemSet,
    valuations: Sequence[Valuation],
    r: ReservePrices,
    num_items: int | None = None,
    prices: str = "min",
) -> WerpEquilibrium:
    """WERP on ``items``; prices off ``items`` equal the reserves."""
    k = infer_num_items(items, valuations, num_items if num_items is not None else len(r))
    _check_reserves(k, r)
    try:
        we = solve_we(items, augment_with_additive_player(valuations, r), k, prices)
    except NoWalrasianEquilibrium as exc:
        raise NoWerpEquilibrium(str(exc)) from exc
    eq = werp_from_augmented(we, r, items)
    if not is_werp(valuations, eq, r, items):
        raise NoWerpEquilibrium(f"mapped prices {eq.prices} do not form a WERP")
    return eq


def min_werp_prices(items: ItemSet, valuations: Sequence[Valuation], r: ReservePrices, num_items: int | None = None) -> PriceVector:
    return solve_werp(items, valuations, r, num_items, "min").prices


def max_werp_prices(items: ItemSet, valuations: Sequence[Valuation], r: ReservePrices, num_items: int | None = None) -> PriceVector:
    return solve_werp(items, valuations, r, num_items, "max").prices


def werp_allocation(items: ItemSet, valuations: Sequence[Valuation], r: ReservePrices, num_items: int | None = None) -> Allocation:
    """A qLP-maximising allocation: welfare-max for the augmented economy, additive bidder dropped."""
    k = infer_num_items(items, valuations, num_items if num_items is not None else len(r))
    sol = max_welfare(items, augment_with_additive_player(valuations, r), k)
    return Allocation(sol.allocation.bundles[:-1])


class WerpPriceOracle(PriceOracle):
    """Minimum and maximum WERP prices for every ground set of one bidder group."""

    def __init__(self, valuations: Sequence[Valuation], r: ReservePrices, num_items: int | None = None):
        k = len(r) if num_items is None else num_items
        _check_reserves(k, r)
        super().__init__(valuations, k, r)


def _valuations_of(instance) -> list[Valuation]:
    if isinstance(instance, Instance):
        return instance.valuations
    return list(instance)


def _lattice_op(op, name, p1, p2, instance, r, ground):
    vals = _valuations_of(instance)
    ground = (1 << len(r)) - 1 if ground is None else ground
    for label, p in (("first", p1), ("second", p2)):
        if not is_werp_price(vals, p, r, ground):
            raise LatticeViolation(f"{label} argument {p} is not a WERP price vector")
    out = op(p1, p2)
    if not is_werp_price(vals, out, r, ground):
        raise LatticeViolation(f"{name} {out} of {p1} and {p2} is not a WERP price vector")
    return out


def werp_lattice_meet(p1: PriceVector, p2: PriceVector, instance, r: ReservePrices, ground: ItemSet | None = None) -> PriceVector:
    """Pointwise min of two WERP price vectors, re-verified."""
    return _lattice_op(pointwise_min, "meet", p1, p2, instance, r, ground)


def werp_lattice_join(p1: PriceVector, p2: PriceVector, instance, r: ReservePrices, ground: ItemSet | None = None) -> PriceVector:
    return _lattice_op(pointwise_max, "join", p1, p2, instance, r, ground)
