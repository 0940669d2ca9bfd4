"""Seeded random instances whose bidders are gross substitutes by construction."""
from __future__ import annotations

import random
from fractions import Fraction

from .core import Instance, PriceVector
from .valuations import Additive, Or, UnitDemand, Valuation

MIXES = ("ud", "additive", "or", "mixed")
MAX_GEN_ITEMS = 8


def _value(rng: random.Random, max_value: int, max_den: int) -> Fraction:
    den = rng.randint(1, max_den)
    return Fraction(rng.randint(0, max_value * den), den)


def _values(rng, k, max_value, max_den, zero_share=0.25):
    return tuple(Fraction(0) if rng.random() < zero_share else _value(rng, max_value, max_den) for _ in range(k))


def random_valuation(rng: random.Random, k: int, kind: str, max_value: int = 10, max_den: int = 3) -> Valuation:
    if kind == "mixed":
        kind = rng.choice(("ud", "additive", "or"))
    if kind == "ud":
        return UnitDemand(_values(rng, k, max_value, max_den))
    if kind == "additive":
        return Additive(_values(rng, k, max_value, max_den))
    if kind == "or":
        return Or(tuple(UnitDemand(_values(rng, k, max_value, max_den, 0.5)) for _ in range(rng.randint(2, 3))))
    raise ValueError(f"unknown mix {kind!r}; choose from {', '.join(MIXES)}")


def generate_instance(
    seed: int,
    k: int,
    n: int,
    m: int,
    mix: str = "mixed",
    max_value: int = 10,
    max_den: int = 3,
) -> Instance:
    """``n`` bidders over ``k`` items split as evenly as possible among ``m`` mediators."""
    if mix not in MIXES:
        raise ValueError(f"unknown mix {mix!r}; choose from {', '.join(MIXES)}")
    if not 0 <= k <= MAX_GEN_ITEMS:
        raise ValueError(f"generated instances have at most {MAX_GEN_ITEMS} items, got {k}")
    if m < 1 or n < m:
        raise ValueError(f"need at least one bidder per mediator, got {n} bidders and {m} mediators")
    if max_value < 1 or max_den < 1:
        raise ValueError("max_value and max_den must be positive")
    rng = random.Random(seed)
    bidders = tuple((f"b{i}", random_valuation(rng, k, mix, max_value, max_den)) for i in range(n))
    order = list(range(n))
    rng.shuffle(order)
    groups: list[list[int]] = [[] for _ in range(m)]
    for pos, b in enumerate(order):
        groups[pos % m].append(b)
    mediators = tuple((f"M{i}", tuple(f"b{b}" for b in sorted(g))) for i, g in enumerate(groups))
    return Instance(k, bidders, mediators)


def random_reserves(rng: random.Random, k: int, max_value: int = 10, max_den: int = 3) -> PriceVector:
    return PriceVector(_values(rng, k, max_value, max_den, 0.3))


def corpus(
    count: int,
    seed: int = 0,
    max_items: int = 5,
    max_mediators: int = 3,
    max_per_mediator: int = 4,
    mixes=MIXES,
) -> list[tuple[str, Instance]]:
    """``count`` instances with sizes drawn from one master seed.

    Each instance comes with a label holding its generator arguments, so a
    failing case can be regenerated alone.
    """
    master = random.Random(seed)
    out = []
    for idx in range(count):
        s = master.randrange(2**32)
        k = master.randint(1, max_items)
        m = master.randint(1, max_mediators)
        n = master.randint(m, m * max_per_mediator)
        mix = mixes[idx % len(mixes)]
        out.append((f"seed={s} k={k} n={n} m={m} mix={mix}", generate_instance(s, k, n, m, mix)))
    return out
