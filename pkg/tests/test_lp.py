from fractions import Fraction

import pytest

from threeparty.lp import Infeasible, Unbounded, solve_lp

F = Fraction


def test_simple_minimum():
    # min x + y  s.t.  x + 2y >= 2, 3x + y >= 3
    res = solve_lp([1, 1], A_ub=[[-1, -2], [-3, -1]], b_ub=[-2, -3])
    assert res.value == F(7, 5) and tuple(res.x) == (F(4, 5), F(3, 5))


def test_equality_constraints():
    res = solve_lp([1, 2, 0], A_eq=[[1, 1, 1]], b_eq=[4], A_ub=[[0, -1, 0]], b_ub=[-1])
    assert res.value == 2 and res.x[1] == 1


def test_infeasible():
    with pytest.raises(Infeasible):
        solve_lp([1], A_ub=[[1], [-1]], b_ub=[1, -2])


def test_unbounded():
    with pytest.raises(Unbounded):
        solve_lp([-1, 0], A_ub=[[-1, 1]], b_ub=[0])


def test_degenerate_cycle_prone_problem():
    # a classic degenerate LP; Bland's rule must terminate
    c = [F(-3, 4), 20, F(-1, 2), 6]
    A = [[F(1, 4), -8, -1, 9], [F(1, 2), -12, F(-1, 2), 3], [0, 0, 1, 0]]
    res = solve_lp(c, A_ub=A, b_ub=[0, 0, 1])
    assert res.value == F(-5, 4)
