from math import comb

import pytest
from hypothesis import given, strategies as st

from fibzeta.errors import RerunRequired
from fibzeta.pencil import SurfaceInput, connection_matrix
from fibzeta.planner import (DecayFloor, R_degree, betti_degree, bmp, check_rerun, clog,
                             final_precision, flog, growth_constants, plan, x_fin_for)

from conftest import EX_P5, EX_P11, EX_P17


def test_ex_p17_conjecture_bracket():
    assert plan(1, 13, 26, 17).bracket() == "[18,18,26,26,37;12376,100]"


def test_ex_p17_bracket_from_surface():
    s = SurfaceInput(17, EX_P17)
    conn = connection_matrix(s)
    assert conn.d == 26 and conn.g == 1
    pl = plan(1, 13, conn.d, 17, adj_degree=conn.AdjM_degree, res_degree=len(conn.res) - 1,
              R_deg=R_degree(EX_P17, 17))
    assert pl.bracket() == "[18,18,26,26,37;12376,100]"


def test_ex_p5_and_ex_p11_brackets_with_raised_n3():
    assert plan(1, 31, 62, 5, N3=60).bracket() == "[55,60,72,72,95;23560,100]"
    assert plan(2, 7, 28, 11, N3=25).bracket() == "[19,25,45,45,72;14476,100]"


def test_final_precision_values():
    assert final_precision(62, 1, 5) == 55
    assert final_precision(26, 1, 17) == 18
    assert final_precision(28, 2, 11) == 19


@given(st.integers(0, 40), st.sampled_from([3, 5, 7, 11, 13, 17]))
def test_final_precision_is_least_exponent(D, p):
    e = D // 2
    N = final_precision(D, 0, p)
    bound = 2 * p ** e * comb(D, e)
    assert p ** N >= bound
    assert N == 0 or p ** (N - 1) < bound


def test_betti_degree_examples():
    assert betti_degree(1, 13) == 25
    assert betti_degree(1, 31) == 61
    assert betti_degree(2, 7) == 25


def test_bmp_values():
    assert bmp(4, 11) == 3
    assert bmp(2, 17) == 1
    assert bmp(2, 2) == 2


@given(st.integers(1, 10 ** 6), st.sampled_from([2, 3, 5, 7, 17]))
def test_integer_logs(x, p):
    k = flog(x, p)
    assert p ** k <= x < p ** (k + 1)
    c = clog(x, p)
    assert p ** c >= x and (c == 0 or p ** (c - 1) < x)


@given(st.integers(1, 60), st.sampled_from([5, 7, 11, 17]), st.integers(1, 3))
def test_x_fin_is_least_and_monotone(N3, p, g):
    B = bmp(2 * g, p)
    x = x_fin_for(N3, p, B, g)
    c = 2 * B + 2 * g

    def lhs(y):
        return y // p - flog(2 * y + 1, p) - c * flog(y, p)
    assert lhs(x) >= N3
    assert all(lhs(y) < N3 for y in range(1, x))
    assert x_fin_for(N3 + 1, p, B, g) >= x


def test_ex_p17_dropped_tail_audit():
    # x_fin = 476 gives N2_fin = 28 - 2 = 26 and 12376 = 26 * 476
    pl = plan(1, 13, 26, 17)
    assert pl.x_fin == 476 and pl.N2_fin == 26 and pl.NG_fin == 26 * 476


def test_decay_floor_nondecreasing_on_negative_side():
    f = DecayFloor(17, 0, 1)
    vals = [f(-k) for k in range(1, 10 ** 4)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_growth_constants_are_integers_and_positive():
    gc = growth_constants(2, 7, 3, 2)
    assert isinstance(gc.alpha, int) and isinstance(gc.beta, int)
    assert gc.alpha > 0 and gc.beta > 0


def test_unconditional_plan_dominates_conjecture_plan():
    s = SurfaceInput(17, EX_P17)
    conn = connection_matrix(s)
    kw = dict(adj_degree=conn.AdjM_degree, res_degree=len(conn.res) - 1,
              R_deg=R_degree(EX_P17, 17), Delta_bound=conn.Delta_bound, N_den=conn.N_den)
    a = plan(1, 13, 26, 17, conjecture_mode=True, **kw)
    b = plan(1, 13, 26, 17, conjecture_mode=False, **kw)
    assert (b.N, b.N3, b.N2_fin, b.NG_fin) == (a.N, a.N3, a.N2_fin, a.NG_fin)
    assert b.N2_inf >= a.N2_inf and b.N1 >= a.N1


def test_negative_fiber_valuation_raises_n1_and_flags():
    a = plan(1, 3, 6, 7)
    b = plan(1, 3, 6, 7, ord_F0=-2)
    assert b.N1 == a.N1 + 2
    assert b.flags


def test_n3_below_n_rejected():
    with pytest.raises(ValueError):
        plan(1, 13, 26, 17, N3=10)


def test_check_rerun():
    pl = plan(1, 3, 6, 7)
    check_rerun(pl, 0)
    with pytest.raises(RerunRequired) as ei:
        check_rerun(pl, -1)
    assert ei.value.suggested_N3 > pl.N3


@pytest.mark.parametrize("Q,p", [(EX_P5, 5), (EX_P11, 11)])
def test_surface_degrees(Q, p):
    s = SurfaceInput(p, Q)
    assert R_degree(Q, p) <= p * s.h
