from fractions import Fraction

import pytest
from hypothesis import given, settings

from strategies import economies
from threeparty.core import Allocation, PriceVector, SizeGuard
from threeparty.lp import Infeasible
from threeparty.valuations import Additive, Explicit, UnitDemand, demand_all
from threeparty.verify import (
    brute_welfare,
    check_envy_free,
    enumerate_allocations,
    indirect_utility,
    is_over_demanded,
    is_walrasian_price,
    min_price_lp,
    over_demanded_sets,
    raise_prices,
    requirement_function,
    sample_werp_prices,
    supporting_allocation,
    we_exists,
)
from threeparty.walrasian import solve_we

F = Fraction
P = PriceVector


def test_envy_report():
    vals = [UnitDemand((5,)), UnitDemand((3,))]
    assert check_envy_free(vals, Allocation((1, 0)), P((3,))).ok
    rep = check_envy_free(vals, Allocation((1, 0)), P((2,)))
    assert not rep.ok and rep.envious[0].bidder == 1
    assert "b" in rep.envious[0].describe(["a", "b"])


def test_enumerate_allocations_count():
    assert sum(1 for _ in enumerate_allocations(0b111, 2)) == 27
    assert list(enumerate_allocations(0, 2)) == [(0, 0)]


def test_brute_guard():
    with pytest.raises(SizeGuard):
        brute_welfare((1 << 12) - 1, [UnitDemand((1,) * 12)] * 4, 12)


def test_min_price_lp_examples():
    vals = [UnitDemand((5,)), UnitDemand((3,))]
    assert min_price_lp(0b1, vals, Allocation((1, 0))) == P((3,))
    assert min_price_lp(0b11, [Additive((4, 1))], Allocation((0b11,))) == P((0, 0))
    with pytest.raises(Infeasible):
        min_price_lp(0b1, vals, Allocation((0, 1)))


def test_we_exists_examples():
    assert we_exists(0b11, [UnitDemand((1, 2)), UnitDemand((2, 1))])
    # two complement bidders still clear at (3/2, 3/2)
    pair = Explicit(2, (0, 1, 1, 3))
    assert we_exists(0b11, [pair, pair])
    # a pure complement against a unit-demand rival does not
    assert not we_exists(0b11, [Explicit(2, (0, 0, 0, 3)), UnitDemand((2, 2))])


def test_supporting_allocation():
    vals = [UnitDemand((5,)), UnitDemand((3,))]
    assert supporting_allocation(vals, P((4,)), P((0,)), 0b1) == Allocation((1, 0))
    assert supporting_allocation(vals, P((2,)), P((0,)), 0b1) is None
    assert is_walrasian_price(vals, P((5,))) and not is_walrasian_price(vals, P((6,)))


def test_requirement_function_examples():
    q = P((2, 2))
    assert requirement_function(UnitDemand((5, 5)), q, 0b11) == 1
    assert requirement_function(UnitDemand((5, 5)), q, 0b01) == 0
    assert requirement_function(Additive((5, 5)), q, 0b11) == 2
    assert requirement_function(UnitDemand((1, 1)), q, 0b11) == 0
    assert is_over_demanded([UnitDemand((5, 5))] * 3, q, 0b11)
    assert not is_over_demanded([UnitDemand((5, 5))] * 2, q, 0b11)
    assert over_demanded_sets([UnitDemand((5, 1))] * 2, q) == [0b01]


def test_raise_prices():
    assert raise_prices(P((1, 2, 3)), 0b101, F(1, 2)) == P((F(3, 2), 2, F(7, 2)))


@settings(max_examples=40, deadline=None)
@given(economies(max_items=3, max_bidders=3))
def test_min_we_prices_have_no_over_demanded_set(econ):
    k, vals = econ
    full = (1 << k) - 1
    q = solve_we(full, vals, k).prices
    assert over_demanded_sets(vals, q) == []
    # lowering any positive minimum price makes some set over-demanded
    for j in range(k):
        if q[j] > 0:
            lower = P(tuple(x - F(1, 1000) if i == j else x for i, x in enumerate(q)))
            assert over_demanded_sets(vals, lower) != [] or not is_walrasian_price(vals, lower)


@settings(max_examples=40, deadline=None)
@given(economies(max_items=3, max_bidders=3))
def test_indirect_utility_drop_bounded(econ):
    # raising prices on S by delta costs a bidder at most delta times the
    # requirement on S
    k, vals = econ
    q = solve_we((1 << k) - 1, vals, k).prices
    delta = F(1, 7)
    for s in range(1, 1 << k):
        q2 = raise_prices(q, s, delta)
        for v in vals:
            drop = indirect_utility(v, q) - indirect_utility(v, q2)
            assert drop >= delta * requirement_function(v, q, s)


@settings(max_examples=30, deadline=None)
@given(economies(max_items=3, max_bidders=3))
def test_sampled_prices_are_walrasian_and_distinct(econ):
    k, vals = econ
    r = P.zeros(k)
    samples = sample_werp_prices(vals, r, count=8)
    assert len(samples) == 8
    for p in samples:
        assert is_walrasian_price(vals, p)
    for p in samples:
        alloc = supporting_allocation(vals, p, r, (1 << k) - 1)
        assert all(s in demand_all(v, p) for v, s in zip(vals, alloc))
