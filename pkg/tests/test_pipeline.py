from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from threeparty.core import Instance, NoEquilibrium, NoWalrasianEquilibrium, PriceVector
from threeparty.formats import read_instance
from threeparty.generate import generate_instance
from threeparty.pipeline import (
    bidder_utilities,
    build_mediator_hierarchy,
    check_equilibrium,
    check_min_price_relation,
    max_local_prices,
    seller_revenue,
    solve_three_party,
    trivial_equilibrium_from_we,
    welfare_of_certificate,
)
from threeparty.valuations import UnitDemand
from threeparty.walrasian import max_welfare, solve_we

P = PriceVector


def example2() -> Instance:
    return read_instance("example2.json")


def test_example2_certificate():
    cert = solve_three_party(example2())
    assert cert.central_prices == P((2,))
    assert cert.mediator_allocation.bundles == (0b1, 0)
    assert cert.local_prices == (P((3,)), P((2,)))
    assert cert.bidder_allocation.bundles == (0b1, 0, 0)
    assert cert.revenues == (1, 0)


def test_single_mediator():
    inst = Instance(1, (("a", UnitDemand((5,))), ("b", UnitDemand((3,)))), (("M", ("a", "b")),))
    cert = solve_three_party(inst)
    assert cert.central_prices == P((0,)) and cert.local_prices == (P((3,)),)
    assert cert.revenues == (3,)
    assert check_min_price_relation(inst, cert).passed


def test_lowered_local_price_breaks_r4():
    inst = example2()
    cert = solve_three_party(inst)
    bad = replace(cert, local_prices=(P((Fraction(5, 2),)), cert.local_prices[1]))
    verdict = check_equilibrium(inst, bad)
    assert not verdict["R4"].passed
    assert any("a1" in w for w in verdict["R4"].witnesses)


def test_trivial_certificate_passes_with_zero_revenue():
    inst = example2()
    cert = trivial_equilibrium_from_we(inst)
    assert cert.revenues == (0, 0)
    assert check_equilibrium(inst, cert).passed
    assert set(cert.local_prices) == {cert.central_prices}


def test_complements_fixture_has_no_equilibrium():
    with pytest.raises(NoWalrasianEquilibrium):
        solve_three_party(read_instance("complements.json"))


def test_shape_errors():
    inst = example2()
    cert = solve_three_party(inst)
    with pytest.raises(ValueError):
        check_equilibrium(inst, replace(cert, revenues=(1,)))
    with pytest.raises(ValueError):
        check_equilibrium(inst, replace(cert, central_prices=P((1, 1))))


def test_hierarchy_shapes():
    inst = generate_instance(3, 2, 8, 4)
    assert build_mediator_hierarchy(inst, 1) == inst
    two = build_mediator_hierarchy(inst, 2)
    assert [mid for mid, _ in two.mediators] == ["M0+M1", "M2+M3"]
    top = build_mediator_hierarchy(inst, 5)
    assert len(top.mediators) == 1 and set(top.mediators[0][1]) == set(inst.bidder_ids)
    with pytest.raises(ValueError):
        build_mediator_hierarchy(inst, 0)
    with pytest.raises(ValueError):
        build_mediator_hierarchy(inst, 2, fanout=1)


seeds = st.tuples(st.integers(0, 10**6), st.integers(1, 4), st.integers(1, 3), st.integers(1, 3))


def _inst(t):
    seed, k, m, per = t
    return generate_instance(seed, k, m * per, m)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_solved_certificates_pass(t):
    inst = _inst(t)
    cert = solve_three_party(inst)
    assert check_equilibrium(inst, cert).passed
    assert check_equilibrium(inst, trivial_equilibrium_from_we(inst)).passed
    assert welfare_of_certificate(inst, cert) == max_welfare(inst.all_items, inst.valuations, inst.num_items).welfare


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_max_local_prices_are_bidder_min_prices(t):
    inst = _inst(t)
    cert = solve_three_party(inst)
    rel = check_min_price_relation(inst, cert)
    assert rel.passed, rel.mismatched_items


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_accounting_identity_and_utilities(t):
    inst = _inst(t)
    cert = solve_three_party(inst)
    welfare = welfare_of_certificate(inst, cert)
    utils = bidder_utilities(inst, cert)
    assert welfare == sum(utils) + sum(cert.revenues) + seller_revenue(cert)
    we = solve_we(inst.all_items, inst.valuations, inst.num_items)
    direct = [v.utility(s, we.prices) for v, s in zip(inst.valuations, we.allocation)]
    assert utils == direct


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3))
def test_hierarchy_preserves_welfare_and_prices(seed, k):
    inst = generate_instance(seed, k, 8, 4)
    flat = solve_three_party(inst)
    deep = build_mediator_hierarchy(inst, 2)
    cert = solve_three_party(deep)
    assert welfare_of_certificate(inst, flat) == welfare_of_certificate(deep, cert)
    assert max_local_prices(flat) == max_local_prices(cert)


def test_threads_do_not_change_result():
    inst = generate_instance(11, 3, 9, 3)
    assert solve_three_party(inst, threads=1) == solve_three_party(inst, threads=3)


def test_max_central_prices_still_certify():
    inst = example2()
    cert = solve_three_party(inst, "max")
    assert cert.central_prices == P((5,))
    assert check_equilibrium(inst, cert).passed
