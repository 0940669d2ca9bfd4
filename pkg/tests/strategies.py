"""Hypothesis strategies for small exact valuations."""
from fractions import Fraction

from hypothesis import strategies as st

from threeparty.core import PriceVector
from threeparty.valuations import Additive, Or, UnitDemand

rationals = st.builds(Fraction, st.integers(0, 24), st.integers(1, 3))


def item_values(k):
    return st.lists(rationals, min_size=k, max_size=k).map(tuple)


def gs_valuation(k):
    ud = item_values(k).map(UnitDemand)
    add = item_values(k).map(Additive)
    orud = st.lists(ud, min_size=1, max_size=3).map(lambda cs: Or(tuple(cs)))
    return st.one_of(ud, add, orud)


def prices(k):
    return item_values(k).map(PriceVector)


@st.composite
def economies(draw, max_items=4, max_bidders=4):
    k = draw(st.integers(1, max_items))
    vals = draw(st.lists(gs_valuation(k), min_size=1, max_size=max_bidders))
    return k, vals
