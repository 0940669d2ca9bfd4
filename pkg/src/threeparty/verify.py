"""Brute-force and LP oracles, independent of the solver's table tricks.

Everything here enumerates subsets or allocations directly, or solves the
price LP with the exact simplex in :mod:`threeparty.lp`.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .core import (
    Allocation,
    ItemSet,
    PriceVector,
    SizeGuard,
    items_of,
    pointwise_max,
    pointwise_min,
    submasks,
)
from .lp import Infeasible, solve_lp
from .valuations import Additive, Valuation, demand_all, max_utility
from .walrasian import infer_num_items, max_welfare

BRUTE_LIMIT = 2_000_000


# -- envy ----------------------------------------------------------------------

@dataclass(frozen=True)
class Envy:
    bidder: int
    current: ItemSet
    utility: Fraction
    better: ItemSet
    better_utility: Fraction

    def describe(self, ids: Sequence[str] | None = None) -> str:
        name = ids[self.bidder] if ids else str(self.bidder)
        return (
            f"bidder {name} holds {items_of(self.current)} with utility {self.utility} "
            f"but {items_of(self.better)} gives {self.better_utility}"
        )


@dataclass(frozen=True)
class EnvyReport:
    envious: tuple[Envy, ...]

    @property
    def ok(self) -> bool:
        return not self.envious

    def __bool__(self) -> bool:
        return self.ok


def check_envy_free(
    valuations: Sequence[Valuation],
    allocation: Allocation,
    p: PriceVector,
    ground: ItemSet | None = None,
) -> EnvyReport:
    """Compare each bidder's set with every subset of ``ground`` at prices ``p``."""
    if len(allocation) != len(valuations):
        raise ValueError(f"allocation has {len(allocation)} bundles for {len(valuations)} bidders")
    envious = []
    for b, v in enumerate(valuations):
        g = (1 << v.num_items) - 1 if ground is None else ground
        have = allocation[b]
        u = v.utility(have, p)
        best_set, best = have, u
        for s in submasks(g):
            w = v.utility(s, p)
            if w > best:
                best_set, best = s, w
        if best > u or have & ~g:
            envious.append(Envy(b, have, u, best_set, best))
    return EnvyReport(tuple(envious))


# -- welfare ---------------------------------------------------------------------

def brute_welfare(items: ItemSet, valuations: Sequence[Valuation], num_items: int | None = None) -> Fraction:
    """Max over all ``(n+1)^|items|`` item assignments."""
    infer_num_items(items, valuations, num_items)
    n = len(valuations)
    item_list = items_of(items)
    if (n + 1) ** len(item_list) > BRUTE_LIMIT:
        raise SizeGuard(f"{n + 1}^{len(item_list)} assignments exceed the brute-force limit")
    best = Fraction(0)
    for bundles in enumerate_allocations(items, n):
        w = sum((v.value(s) for v, s in zip(valuations, bundles)), Fraction(0))
        if w > best:
            best = w
    return best


def enumerate_allocations(items: ItemSet, n: int) -> Iterator[tuple[ItemSet, ...]]:
    """Every assignment of ``items`` to ``n`` bidders or to nobody."""
    item_list = items_of(items)
    for choice in itertools.product(range(-1, n), repeat=len(item_list)):
        bundles = [0] * n
        for j, b in zip(item_list, choice):
            if b >= 0:
                bundles[b] |= 1 << j
        yield tuple(bundles)


def brute_matching(weights: Sequence[Sequence[Fraction]]) -> tuple[Fraction, tuple[int | None, ...]]:
    """Best partial matching by enumeration; ties go to the lexicographically least
    column vector with "unmatched" ranked after every column."""
    n = len(weights)
    cols = len(weights[0]) if n else 0
    best_key = None
    best = (Fraction(0), (None,) * n)
    options = list(range(cols)) + [None]
    for choice in itertools.product(options, repeat=n):
        used = [c for c in choice if c is not None]
        if len(used) != len(set(used)):
            continue
        w = sum((Fraction(weights[b][c]) for b, c in enumerate(choice) if c is not None), Fraction(0))
        key = (-w, tuple(cols if c is None else c for c in choice))
        if best_key is None or key < best_key:
            best_key, best = key, (w, choice)
    return best


# -- price LP ------------------------------------------------------------------

def price_polytope_optimum(
    items: ItemSet,
    valuations: Sequence[Valuation],
    allocation: Allocation,
    r: PriceVector,
    cost: Sequence,
    num_items: int | None = None,
) -> PriceVector:
    """Minimise ``cost @ p`` over prices supporting ``allocation`` on ``items``.

    Feasible prices satisfy ``p >= r``, ``p_j == r_j`` on unallocated items of
    ``items``, and every bidder's set is demanded among subsets of ``items``.
    Demand constraints are added lazily: solve, find the violated ones by
    enumeration, repeat. Entries outside ``items`` are set to ``r``.
    """
    k = infer_num_items(items, valuations, num_items)
    if len(r) != k:
        raise ValueError(f"reserve vector has {len(r)} entries, expected {k}")
    sold = allocation.allocated
    if sold & ~items:
        raise ValueError("allocation uses items outside the ground set")
    free = items_of(sold)
    col = {j: c for c, j in enumerate(free)}
    subsets = list(submasks(items))

    def row(b: int, t: ItemSet):
        # p(A) - p(T) <= v(A) - v(T), written in q = p - r
        a = allocation[b]
        coeffs = [Fraction(0)] * len(free)
        for j in items_of(a & ~t):
            coeffs[col[j]] += 1
        for j in items_of(t & ~a & sold):
            coeffs[col[j]] -= 1
        v = valuations[b]
        rhs = v.value(a) - v.value(t) - r.total(a) + r.total(t)
        return coeffs, rhs

    rows = {(b, 0) for b in range(len(valuations))}
    c = [Fraction(cost[j]) for j in free]
    while True:
        keys = sorted(rows)
        A, bvec = zip(*(row(b, t) for b, t in keys)) if keys else ((), ())
        if free:
            res = solve_lp(c, A, bvec)
            q = res.x
        else:
            if any(x < 0 for x in bvec):
                raise Infeasible("allocation cannot be supported")
            q = ()
        p = list(r)
        for j, x in zip(free, q):
            p[j] = r[j] + x
        price = PriceVector(tuple(p))
        added = False
        for b, v in enumerate(valuations):
            a = allocation[b]
            have = v.utility(a, price)
            worst, worst_t = Fraction(0), None
            for t in subsets:
                gap = v.utility(t, price) - have
                if gap > worst:
                    worst, worst_t = gap, t
            if worst_t is not None:
                if (b, worst_t) in rows:
                    raise AssertionError("cutting plane re-added an existing row")
                rows.add((b, worst_t))
                added = True
        if not added:
            return price


def min_price_lp(
    items: ItemSet,
    valuations: Sequence[Valuation],
    allocation: Allocation,
    r: PriceVector | None = None,
    num_items: int | None = None,
) -> PriceVector:
    """Least total price supporting ``allocation`` with reserves ``r``."""
    k = infer_num_items(items, valuations, num_items)
    r = PriceVector.zeros(k) if r is None else r
    return price_polytope_optimum(items, valuations, allocation, r, [1] * k, k)


def augmented(valuations: Sequence[Valuation], r: PriceVector) -> list[Valuation]:
    return list(valuations) + [Additive(tuple(r))]


def min_ef_price_oracle(
    valuations: Sequence[Valuation],
    r: PriceVector,
    ground: ItemSet | None = None,
    num_items: int | None = None,
) -> PriceVector:
    """Least envy-free prices ``p >= r`` on ``ground`` by the LP route."""
    k = len(r) if num_items is None else num_items
    ground = (1 << k) - 1 if ground is None else ground
    sol = max_welfare(ground, augmented(valuations, r), k)
    alloc = Allocation(sol.allocation.bundles[:-1])
    return min_price_lp(ground, valuations, alloc, r, k)


def we_exists(items: ItemSet, valuations: Sequence[Valuation], num_items: int | None = None) -> bool:
    """A Walrasian equilibrium exists iff some price vector supports a welfare-max allocation."""
    k = infer_num_items(items, valuations, num_items)
    sol = max_welfare(items, valuations, k)
    try:
        min_price_lp(items, valuations, sol.allocation, None, k)
    except Infeasible:
        return False
    return True


def werp_supportable(
    items: ItemSet,
    valuations: Sequence[Valuation],
    allocation: Allocation,
    r: PriceVector,
    num_items: int | None = None,
) -> bool:
    try:
        min_price_lp(items, valuations, allocation, r, num_items)
    except Infeasible:
        return False
    return True


def qlp_objective(valuations: Sequence[Valuation], allocation: Allocation, r: PriceVector, ground: ItemSet) -> Fraction:
    """Bidder welfare plus the reserves of unsold ground items."""
    w = sum((v.value(s) for v, s in zip(valuations, allocation)), Fraction(0))
    return w + r.total(ground & ~allocation.allocated)


# -- membership and sampling ---------------------------------------------------

def supporting_allocation(
    valuations: Sequence[Valuation],
    p: PriceVector,
    r: PriceVector,
    ground: ItemSet,
) -> Allocation | None:
    """An allocation of ``ground`` that ``p`` supports as a WERP, or None.

    Each bidder takes a demanded subset of ``ground``; items priced above
    their reserve must all be sold.
    """
    if not p >= r:
        return None
    if any(p[j] != r[j] for j in items_of(~ground & ((1 << len(p)) - 1))):
        return None
    must = 0
    for j in items_of(ground):
        if p[j] > r[j]:
            must |= 1 << j
    families = [sorted(demand_all(v, p, ground)) for v in valuations]
    chosen: list[ItemSet] = []

    def rec(b: int, used: ItemSet) -> bool:
        if b == len(families):
            return used & must == must
        for d in families[b]:
            if not d & used:
                chosen.append(d)
                if rec(b + 1, used | d):
                    return True
                chosen.pop()
        return False

    if rec(0, 0):
        return Allocation(tuple(chosen))
    return None


def is_werp_price(valuations: Sequence[Valuation], p: PriceVector, r: PriceVector, ground: ItemSet | None = None) -> bool:
    ground = (1 << len(p)) - 1 if ground is None else ground
    return supporting_allocation(valuations, p, r, ground) is not None


def is_walrasian_price(valuations: Sequence[Valuation], p: PriceVector, ground: ItemSet | None = None) -> bool:
    return is_werp_price(valuations, p, PriceVector.zeros(len(p)), ground)


def sample_werp_prices(
    valuations: Sequence[Valuation],
    r: PriceVector,
    ground: ItemSet | None = None,
    count: int = 20,
    rng: random.Random | None = None,
) -> list[PriceVector]:
    """Distinct points of the WERP price polytope: vertices under random costs,
    then convex mixes of vertex pairs.

    Costs have mixed signs so the vertices are not all comparable. A polytope
    that is a single point yields ``count`` copies of it.
    """
    rng = rng or random.Random(0)
    k = len(r)
    ground = (1 << k) - 1 if ground is None else ground
    sol = max_welfare(ground, augmented(valuations, r), k)
    alloc = Allocation(sol.allocation.bundles[:-1])
    vertices: list[PriceVector] = []
    for sign in (1, -1):
        vertices.append(price_polytope_optimum(ground, valuations, alloc, r, [sign] * k, k))
    tries = 0
    while len(vertices) < max(2, count // 2) and tries < 4 * count:
        tries += 1
        cost = [rng.randint(-3, 3) for _ in range(k)]
        vertices.append(price_polytope_optimum(ground, valuations, alloc, r, cost, k))
    out = list(dict.fromkeys(vertices))
    if len(out) == 1:
        return out * count
    seen = set(out)
    tries = 0
    while len(out) < count and tries < 50 * count:
        tries += 1
        a, b = rng.sample(vertices, 2)
        lam = Fraction(rng.randint(1, 59), 60)
        p = PriceVector(tuple(lam * x + (1 - lam) * y for x, y in zip(a, b)))
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out[:count]


def sample_walrasian_prices(
    valuations: Sequence[Valuation],
    ground: ItemSet | None = None,
    count: int = 20,
    rng: random.Random | None = None,
    num_items: int | None = None,
) -> list[PriceVector]:
    k = num_items if num_items is not None else valuations[0].num_items
    return sample_werp_prices(valuations, PriceVector.zeros(k), ground, count, rng)


def lattice_pair_ok(valuations, p1: PriceVector, p2: PriceVector, r: PriceVector, ground: ItemSet) -> bool:
    return is_werp_price(valuations, pointwise_min(p1, p2), r, ground) and is_werp_price(
        valuations, pointwise_max(p1, p2), r, ground
    )


# -- requirement function ------------------------------------------------------

def requirement_function(v: Valuation, q: PriceVector, s: ItemSet) -> int:
    """Fewest items of ``s`` in any demanded set at ``q``."""
    return min(bin(d & s).count("1") for d in demand_all(v, q))


def is_over_demanded(valuations: Sequence[Valuation], q: PriceVector, s: ItemSet) -> bool:
    return sum(requirement_function(v, q, s) for v in valuations) > bin(s).count("1")


def indirect_utility(v: Valuation, q: PriceVector) -> Fraction:
    return max_utility(v, q)


def raise_prices(q: PriceVector, s: ItemSet, delta: Fraction) -> PriceVector:
    return PriceVector(tuple(x + delta if s >> j & 1 else x for j, x in enumerate(q)))


def over_demanded_sets(valuations: Sequence[Valuation], q: PriceVector) -> list[ItemSet]:
    k = len(q)
    return [s for s in range(1, 1 << k) if is_over_demanded(valuations, q, s)]
