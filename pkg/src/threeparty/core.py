"""Exact scalars, item sets, price vectors, allocations and auction instances.

Item sets are plain ``int`` bitmasks over item indices ``0..k-1``; bit ``j``
set means item ``j`` is in the set. Every scalar is a
:class:`fractions.Fraction`, so no comparison in the engine needs a tolerance.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import TYPE_CHECKING, Iterable, Iterator, Sequence

if TYPE_CHECKING:
    from .valuations import Valuation

MAX_ITEMS = 62

Rational = Fraction
ItemSet = int


class AuctionError(Exception):
    """Base class for all engine errors."""


class SizeGuard(AuctionError):
    """An exhaustive routine was asked to run beyond its size guard."""


class NoWalrasianEquilibrium(AuctionError):
    pass


class NoWerpEquilibrium(AuctionError):
    pass


class NoEquilibrium(AuctionError):
    pass


class LatticeViolation(AuctionError):
    pass


class EquivalenceViolation(AuctionError):
    def __init__(self, message: str, witness: ItemSet | None = None):
        super().__init__(message)
        self.witness = witness


class OracleDisagreement(AuctionError):
    """Two independent routes to the same quantity returned different values."""


def to_rational(x) -> Fraction:
    """Coerce an int, Fraction or ``"num/den"`` string to a Fraction.

    Floats are refused: they would smuggle rounding into exact comparisons.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {x!r}") from exc
    raise TypeError(f"cannot use {type(x).__name__} as an exact rational")


def format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def check_num_items(k: int) -> int:
    if not isinstance(k, int) or isinstance(k, bool) or k < 0:
        raise ValueError(f"number of items must be a non-negative integer, got {k!r}")
    if k > MAX_ITEMS:
        raise ValueError(f"at most {MAX_ITEMS} items are supported, got {k}")
    return k


def full_set(k: int) -> ItemSet:
    return (1 << k) - 1


def items_of(mask: ItemSet) -> list[int]:
    out = []
    j = 0
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return out


def mask_of(items: Iterable[int]) -> ItemSet:
    mask = 0
    for j in items:
        if j < 0:
            raise ValueError(f"negative item index {j}")
        mask |= 1 << j
    return mask


def submasks(mask: ItemSet) -> Iterator[ItemSet]:
    """All subsets of ``mask`` in increasing bitmask order."""
    subs = []
    t = mask
    while True:
        subs.append(t)
        if t == 0:
            break
        t = (t - 1) & mask
    return reversed(subs)


def format_set(mask: ItemSet) -> str:
    return "{" + ",".join(map(str, items_of(mask))) + "}"


@dataclass(frozen=True)
class PriceVector:
    """Non-negative exact price per item."""

    prices: tuple[Fraction, ...]

    def __post_init__(self):
        prices = tuple(to_rational(x) for x in self.prices)
        for j, x in enumerate(prices):
            if x < 0:
                raise ValueError(f"price of item {j} is negative: {x}")
        check_num_items(len(prices))
        object.__setattr__(self, "prices", prices)

    @classmethod
    def zeros(cls, k: int) -> PriceVector:
        return cls((Fraction(0),) * k)

    def __len__(self) -> int:
        return len(self.prices)

    def __getitem__(self, j: int) -> Fraction:
        return self.prices[j]

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.prices)

    def total(self, items: ItemSet) -> Fraction:
        return sum((self.prices[j] for j in items_of(items)), Fraction(0))

    @cached_property
    def sums(self) -> tuple[Fraction, ...]:
        """``sums[S] == total(S)`` for every subset, built incrementally."""
        out = [Fraction(0)] * (1 << len(self.prices))
        for s in range(1, len(out)):
            low = s & -s
            out[s] = out[s ^ low] + self.prices[low.bit_length() - 1]
        return tuple(out)

    def __le__(self, other: PriceVector) -> bool:
        _same_length(self, other)
        return all(a <= b for a, b in zip(self.prices, other.prices))

    def __ge__(self, other: PriceVector) -> bool:
        return other <= self

    def replace(self, j: int, value) -> PriceVector:
        prices = list(self.prices)
        prices[j] = to_rational(value)
        return PriceVector(tuple(prices))

    def __str__(self) -> str:
        return "(" + ", ".join(format_rational(x) for x in self.prices) + ")"


def _same_length(p: PriceVector, q: PriceVector) -> None:
    if len(p) != len(q):
        raise ValueError(f"price vectors have different lengths {len(p)} and {len(q)}")


def price_sum(p: PriceVector, items: ItemSet) -> Fraction:
    if items >> len(p):
        raise ValueError(f"item set {format_set(items)} is not inside {len(p)} items")
    return p.total(items)


def pointwise_min(p: PriceVector, q: PriceVector) -> PriceVector:
    _same_length(p, q)
    return PriceVector(tuple(min(a, b) for a, b in zip(p.prices, q.prices)))


def pointwise_max(p: PriceVector, q: PriceVector) -> PriceVector:
    _same_length(p, q)
    return PriceVector(tuple(max(a, b) for a, b in zip(p.prices, q.prices)))


@dataclass(frozen=True)
class Allocation:
    """Disjoint bundles indexed by bidder (or mediator) position.

    Items outside every bundle are unallocated.
    """

    bundles: tuple[ItemSet, ...]

    def __post_init__(self):
        bundles = tuple(int(b) for b in self.bundles)
        seen = 0
        for b, bundle in enumerate(bundles):
            if bundle < 0:
                raise ValueError(f"bundle of bidder {b} is not a valid item set")
            if bundle & seen:
                raise ValueError(
                    f"bundle of bidder {b} overlaps an earlier bundle on items "
                    f"{format_set(bundle & seen)}"
                )
            seen |= bundle
        object.__setattr__(self, "bundles", bundles)

    @classmethod
    def empty(cls, n: int) -> Allocation:
        return cls((0,) * n)

    def __len__(self) -> int:
        return len(self.bundles)

    def __getitem__(self, b: int) -> ItemSet:
        return self.bundles[b]

    def __iter__(self) -> Iterator[ItemSet]:
        return iter(self.bundles)

    @property
    def allocated(self) -> ItemSet:
        out = 0
        for bundle in self.bundles:
            out |= bundle
        return out

    def owner(self, j: int) -> int | None:
        for b, bundle in enumerate(self.bundles):
            if bundle >> j & 1:
                return b
        return None

    def __str__(self) -> str:
        return "[" + ", ".join(format_set(b) for b in self.bundles) + "]"


@dataclass(frozen=True)
class Instance:
    """Items, bidders with valuations and the bidder-to-mediator assignment.

    ``mediators`` maps each mediator id to the ids of its bidders; the lists
    must partition the bidder set.
    """

    num_items: int
    bidders: tuple[tuple[str, "Valuation"], ...]
    mediators: tuple[tuple[str, tuple[str, ...]], ...]

    def __post_init__(self):
        check_num_items(self.num_items)
        bidders = tuple((str(bid), v) for bid, v in self.bidders)
        mediators = tuple((str(mid), tuple(str(b) for b in members)) for mid, members in self.mediators)
        object.__setattr__(self, "bidders", bidders)
        object.__setattr__(self, "mediators", mediators)

        ids = [bid for bid, _ in bidders]
        if len(set(ids)) != len(ids):
            raise ValueError("bidder ids are not unique")
        for bid, v in bidders:
            if v.num_items != self.num_items:
                raise ValueError(
                    f"valuation of bidder {bid} is over {v.num_items} items, "
                    f"instance has {self.num_items}"
                )
        if not mediators:
            raise ValueError("instance has no mediators")
        mids = [mid for mid, _ in mediators]
        if len(set(mids)) != len(mids):
            raise ValueError("mediator ids are not unique")
        assigned: dict[str, str] = {}
        for mid, members in mediators:
            if not members:
                raise ValueError(f"mediator {mid} has no bidders")
            for b in members:
                if b not in set(ids):
                    raise ValueError(f"mediator {mid} lists unknown bidder {b}")
                if b in assigned:
                    raise ValueError(f"bidder {b} is connected to both {assigned[b]} and {mid}")
                assigned[b] = mid
        missing = [b for b in ids if b not in assigned]
        if missing:
            raise ValueError(f"bidders without a mediator: {', '.join(missing)}")

    @property
    def valuations(self) -> list["Valuation"]:
        return [v for _, v in self.bidders]

    @property
    def bidder_ids(self) -> list[str]:
        return [b for b, _ in self.bidders]

    @property
    def mediator_ids(self) -> list[str]:
        return [m for m, _ in self.mediators]

    @cached_property
    def _bidder_pos(self) -> dict[str, int]:
        return {b: i for i, (b, _) in enumerate(self.bidders)}

    def members(self, i: int) -> tuple[int, ...]:
        """Bidder positions of mediator ``i``."""
        return tuple(self._bidder_pos[b] for b in self.mediators[i][1])

    def mediator_of(self, b: int) -> int:
        bid = self.bidders[b][0]
        for i, (_, members) in enumerate(self.mediators):
            if bid in members:
                return i
        raise KeyError(bid)

    @property
    def all_items(self) -> ItemSet:
        return full_set(self.num_items)


def require_same_items(num_items: int, vectors: Sequence[PriceVector]) -> None:
    for p in vectors:
        if len(p) != num_items:
            raise ValueError(f"price vector has {len(p)} entries, expected {num_items}")
