import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from threeparty.formats import (
    FormatError,
    canonicalize_instance,
    dump_certificate,
    dump_instance,
    load_certificate,
    load_instance,
    read_instance,
    resolve_path,
)
from threeparty.generate import generate_instance
from threeparty.pipeline import check_equilibrium, solve_three_party


def test_example_fixture_loads():
    inst = read_instance("example2.json")
    assert inst.bidder_ids == ["a0", "a1", "b0"]
    assert resolve_path("example2.json").exists()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 5), st.sampled_from(["ud", "additive", "or", "mixed"]))
def test_instance_round_trip(seed, k, mix):
    inst = generate_instance(seed, k, 4, 2, mix)
    text = dump_instance(inst)
    assert load_instance(text) == inst
    assert canonicalize_instance(text) == text


def test_certificate_round_trip():
    inst = read_instance("example2.json")
    cert = solve_three_party(inst)
    verdict = check_equilibrium(inst, cert)
    text = dump_certificate(inst, cert, verdict)
    assert load_certificate(text, inst) == cert
    obj = json.loads(text)
    assert obj["revenues"] == {"A": 1, "B": 0}
    assert "timings" not in obj
    assert all(v["passed"] and v["witnesses"] == [] for v in obj["verdicts"].values())


def test_rationals_are_strings():
    inst = generate_instance(5, 2, 2, 1, "ud", max_den=3)
    obj = json.loads(dump_instance(inst))
    for b in obj["bidders"]:
        for x in b["valuation"]["values"]:
            assert isinstance(x, int) or (isinstance(x, str) and Fraction(x).denominator > 1)


BASE = {
    "num_items": 1,
    "bidders": [{"id": "a", "valuation": {"type": "unit_demand", "values": [5]}}],
    "mediators": [{"id": "A", "bidders": ["a"]}],
}


def _bad(mutate):
    obj = json.loads(json.dumps(BASE))
    mutate(obj)
    return json.dumps(obj)


@pytest.mark.parametrize(
    "mutate, fragment",
    [
        (lambda o: o.update(mediators=[]), "mediator"),
        (lambda o: o["bidders"][0]["valuation"].update(values=[5, 1]), "list of 1 values"),
        (lambda o: o["bidders"][0]["valuation"].update(values=[0.5]), "float"),
        (lambda o: o["bidders"][0]["valuation"].update(type="quadratic"), "type"),
        (lambda o: o["bidders"][0]["valuation"].update(values=["-1"]), "negative"),
        (lambda o: o["mediators"][0].update(bidders=["a", "zz"]), "unknown"),
        (lambda o: o.pop("num_items"), "num_items"),
    ],
)
def test_load_errors(mutate, fragment):
    with pytest.raises(FormatError) as err:
        load_instance(_bad(mutate))
    assert fragment in str(err.value)


def test_syntax_error_has_position():
    with pytest.raises(FormatError, match="line 2 column"):
        load_instance('{\n  "num_items": ,\n}')
