from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from threeparty.core import (
    Allocation,
    Instance,
    PriceVector,
    pointwise_max,
    pointwise_min,
    price_sum,
    submasks,
    to_rational,
)
from threeparty.valuations import UnitDemand

F = Fraction


def test_price_sum_examples():
    p = PriceVector((F(1, 2), 3))
    assert price_sum(p, 0b11) == F(7, 2)
    assert price_sum(p, 0) == 0
    assert price_sum(PriceVector((2, 2, 2)), 0b101) == 4


def test_price_sum_rejects_items_outside():
    with pytest.raises(ValueError):
        price_sum(PriceVector((1,)), 0b10)


def test_pointwise_examples():
    p, q = PriceVector((1, 4)), PriceVector((2, 3))
    assert pointwise_min(p, q) == PriceVector((1, 3))
    assert pointwise_max(p, q) == PriceVector((2, 4))
    assert pointwise_min(p, p) == p


def test_pointwise_length_mismatch():
    with pytest.raises(ValueError):
        pointwise_min(PriceVector((1,)), PriceVector((1, 2)))


vectors = st.lists(st.builds(F, st.integers(0, 20), st.integers(1, 4)), min_size=3, max_size=3).map(PriceVector)


@given(vectors, vectors, vectors)
def test_lattice_operations(p, q, s):
    lo, hi = pointwise_min(p, q), pointwise_max(p, q)
    assert lo <= p and lo <= q and hi >= p and hi >= q
    assert lo == pointwise_min(q, p) and hi == pointwise_max(q, p)
    assert pointwise_min(pointwise_min(p, q), s) == pointwise_min(p, pointwise_min(q, s))
    assert pointwise_max(pointwise_max(p, q), s) == pointwise_max(p, pointwise_max(q, s))


def test_price_vector_rejects_negative_and_float():
    with pytest.raises(ValueError):
        PriceVector((1, -1))
    with pytest.raises(TypeError):
        PriceVector((0.5,))


def test_rational_strings():
    assert to_rational("3/6") == F(1, 2)
    with pytest.raises(ValueError):
        to_rational("half")


def test_sums_table_matches_total():
    p = PriceVector((F(1, 3), 2, F(5, 2)))
    assert all(p.sums[s] == p.total(s) for s in range(8))


def test_allocation_overlap_rejected():
    with pytest.raises(ValueError, match="overlaps"):
        Allocation((0b011, 0b010))
    a = Allocation((0b001, 0b100))
    assert a.allocated == 0b101 and a.owner(2) == 1 and a.owner(1) is None


def test_submasks_ascending():
    assert list(submasks(0b101)) == [0, 1, 4, 5]


def test_instance_validation():
    v = UnitDemand((1,))
    Instance(1, (("a", v),), (("M", ("a",)),))
    with pytest.raises(ValueError, match="no mediators"):
        Instance(1, (("a", v),), ())
    with pytest.raises(ValueError, match="both"):
        Instance(1, (("a", v),), (("M", ("a",)), ("N", ("a",))))
    with pytest.raises(ValueError, match="without a mediator"):
        Instance(1, (("a", v), ("b", v)), (("M", ("a",)),))
    with pytest.raises(ValueError, match="unknown"):
        Instance(1, (("a", v),), (("M", ("a", "z")),))
    with pytest.raises(ValueError, match="items"):
        Instance(2, (("a", v),), (("M", ("a",)),))


def test_item_cap():
    with pytest.raises(ValueError):
        PriceVector.zeros(63)
