from fractions import Fraction

import pytest
from hypothesis import given, settings

from strategies import economies
from threeparty.core import Allocation, NoWalrasianEquilibrium, PriceVector
from threeparty.valuations import Additive, Explicit, UnitDemand, demand_all
from threeparty.verify import brute_welfare, check_envy_free, enumerate_allocations, min_price_lp, sample_walrasian_prices
from threeparty.walrasian import (
    max_walrasian_prices,
    max_welfare,
    min_walrasian_prices,
    solve_we,
    welfare_of,
)

F = Fraction


def test_max_welfare_examples():
    sol = max_welfare(0b1, [UnitDemand((5,)), UnitDemand((3,))])
    assert sol.allocation == Allocation((0b1, 0)) and sol.welfare == 5
    sol = max_welfare(0b1, [], 1)
    assert sol.allocation == Allocation(()) and sol.welfare == 0
    sol = max_welfare(0b11, [Additive((4, 1)), UnitDemand((2, 3))])
    assert sol.allocation == Allocation((0b01, 0b10)) and sol.welfare == 7


def test_lexicographic_tie_break():
    # both bidders value the item equally; the first gets it
    sol = max_welfare(0b1, [UnitDemand((2,)), UnitDemand((2,))])
    assert sol.allocation == Allocation((0b1, 0))
    # a zero-valued item stays unallocated
    sol = max_welfare(0b11, [UnitDemand((3, 0))])
    assert sol.allocation == Allocation((0b01,))


def test_min_price_examples():
    assert min_walrasian_prices(0b1, [UnitDemand((5,)), UnitDemand((3,))]) == PriceVector((3,))
    assert min_walrasian_prices(0b1, [UnitDemand((5,))]) == PriceVector((0,))
    assert min_walrasian_prices(0b11, [Additive((4, 1))]) == PriceVector((0, 0))


def test_max_price_examples():
    assert max_walrasian_prices(0b1, [UnitDemand((5,)), UnitDemand((3,))]) == PriceVector((5,))
    assert max_walrasian_prices(0b11, [Additive((4, 1))]) == PriceVector((4, 1))


def test_solve_we_examples():
    we = solve_we(0b1, [UnitDemand((5,)), UnitDemand((3,))])
    assert we.allocation == Allocation((1, 0)) and we.prices == PriceVector((3,))
    we = solve_we(0, [UnitDemand((5, 1))], 2)
    assert we.allocation == Allocation((0,)) and we.prices == PriceVector((0, 0))


def test_complements_without_we():
    with pytest.raises(NoWalrasianEquilibrium):
        solve_we(0b11, [Explicit(2, (0, 0, 0, 3)), UnitDemand((2, 2))])


def test_complements_with_we_use_lp_fallback():
    # the duplicate-item prices (1, 1) fail here, yet (3/2, 3/2) clears
    pair = Explicit(2, (0, 1, 1, 3))
    we = solve_we(0b11, [pair, pair])
    assert we.allocation == Allocation((0b11, 0))
    assert check_envy_free([pair, pair], we.allocation, we.prices).ok
    assert we.prices.total(0b11) == 3


@settings(max_examples=80, deadline=None)
@given(economies(max_items=4, max_bidders=4))
def test_max_welfare_matches_brute_force(econ):
    k, vals = econ
    full = (1 << k) - 1
    assert max_welfare(full, vals, k).welfare == brute_welfare(full, vals, k)


@settings(max_examples=60, deadline=None)
@given(economies(max_items=3, max_bidders=3))
def test_min_and_max_prices_are_extreme(econ):
    k, vals = econ
    full = (1 << k) - 1
    lo = solve_we(full, vals, k, "min")
    hi = solve_we(full, vals, k, "max")
    assert check_envy_free(vals, lo.allocation, lo.prices).ok
    assert check_envy_free(vals, hi.allocation, hi.prices).ok
    assert lo.prices == min_price_lp(full, vals, lo.allocation, None, k)
    assert lo.prices <= hi.prices
    for p in sample_walrasian_prices(vals, full, count=6):
        assert lo.prices <= p <= hi.prices


@settings(max_examples=40, deadline=None)
@given(economies(max_items=3, max_bidders=3))
def test_we_prices_support_every_optimal_allocation(econ):
    # Walrasian prices support every welfare-maximizing allocation
    k, vals = econ
    full = (1 << k) - 1
    we = solve_we(full, vals, k)
    best = welfare_of(vals, we.allocation)
    for bundles in enumerate_allocations(full, len(vals)):
        alloc = Allocation(bundles)
        if welfare_of(vals, alloc) != best:
            continue
        for v, s in zip(vals, bundles):
            assert s in demand_all(v, we.prices)
        unsold = full & ~alloc.allocated
        assert all(we.prices[j] == 0 for j in range(k) if unsold >> j & 1)
