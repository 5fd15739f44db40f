import random
import re
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from fibzeta.errors import WeilDisambiguationFailed
from fibzeta.ffield import count_affine_surface, counts_from_zeta
from fibzeta.padic import PadicMatrix, vp
from fibzeta.pencil import SurfaceInput
from fibzeta.zeta import (FiberFactor, complete_weil, factor_over_Z, factored_display, is_weight_two,
                          p2_open, pmul, pprod, q2_reciprocal, separating_precision, weil_bounds,
                          zeta_curves_C, zeta_open)

from conftest import EX_P17

EX_P17_R = (
    "1+2^{3}T^{1}+2^{1}3^{2}17^{1}T^{2}+2^{4}17^{1}19^{1}T^{3}+2^{2}3^{2}5^{1}17^{2}T^{4}"
    "+3^{1}17^{3}23^{1}T^{5}+17^{4}23^{1}T^{6}-2^{1}5^{1}17^{5}T^{7}+3^{4}17^{6}T^{8}"
    "+2^{2}5^{1}7^{1}17^{7}T^{9}+2^{1}17^{8}191^{1}T^{10}+2^{4}13^{1}17^{9}T^{11}"
    "+2^{1}17^{10}191^{1}T^{12}+2^{2}5^{1}7^{1}17^{11}T^{13}+3^{4}17^{12}T^{14}"
    "-2^{1}5^{1}17^{13}T^{15}+17^{14}23^{1}T^{16}+3^{1}17^{15}23^{1}T^{17}"
    "+2^{2}3^{2}5^{1}17^{16}T^{18}+2^{4}17^{17}19^{1}T^{19}+2^{1}3^{2}17^{19}T^{20}"
    "+2^{3}17^{20}T^{21}+17^{22}T^{22}")


def parse_factored(text):
    """Inverse of ``factored_display``."""
    out = {}
    for sign, body in re.findall(r"([+-]?)([^+-]+)", text):
        m = re.fullmatch(r"((?:\d+\^\{\d+\})*|1)?(?:T\^\{(\d+)\})?", body)
        assert m, body
        coef = 1
        for base, exp in re.findall(r"(\d+)\^\{(\d+)\}", m.group(1) or ""):
            coef *= int(base) ** int(exp)
        deg = int(m.group(2) or 0)
        out[deg] = -coef if sign == "-" else coef
    return [out.get(i, 0) for i in range(max(out) + 1)]


def test_reference_polynomial_matches_enumeration_ex_p17():
    q = 17
    R = parse_factored(EX_P17_R)
    assert len(R) == 23
    P2 = pprod([[1, -q], [1, -q], [1, q], R])
    den = pprod([[1, -1], P2, [1, -q * q]])
    pred = counts_from_zeta([1], den, 2)
    Qbar = SurfaceInput(q, EX_P17).Qbar()
    obs = [count_affine_surface(Qbar, q, s) + q ** s + 1 for s in (1, 2)]
    assert pred == obs
    assert is_weight_two(R, q)


@given(st.lists(st.integers(-10 ** 6, 10 ** 6), min_size=1, max_size=12).filter(lambda c: c[-1]))
def test_factored_display_roundtrip(c):
    assert parse_factored(factored_display(c, 7)) == c


def test_factored_display_format():
    assert factored_display([1, -14, 49], 7) == "1-2^{1}7^{1}T^{1}+7^{2}T^{2}"
    assert factored_display([1, 0, -1], 7) == "1-T^{2}"


def test_p2_open_one_by_one():
    F = PadicMatrix([[Fraction(21)]], 7)
    out = [c.to_fraction() for c in p2_open(F, 7).coeffs]
    assert out == [1, Fraction(-49, 21)]


def _p2_sympy(A, q):
    T = sympy.symbols("T")
    M = sympy.Matrix(A)
    P = sympy.Poly((sympy.eye(M.rows) - T * q * q * M.inv()).det(), T)
    return [Fraction(int(x.p), int(x.q)) for x in reversed(P.all_coeffs())]


@pytest.mark.parametrize("seed", range(6))
def test_p2_open_matches_exact_inverse(seed):
    rng = random.Random(seed)
    q = 5
    n = 2 if seed < 3 else 3
    while True:
        A = [[rng.randint(-20, 20) * (q if rng.random() < 0.5 else 1) for _ in range(n)]
             for _ in range(n)]
        if sympy.Matrix(A).det() != 0:
            break
    got = [c.to_fraction() for c in p2_open(PadicMatrix(A, q), q).coeffs]
    assert got == _p2_sympy(A, q)


def test_zeta_open_and_curves_trivial_cases():
    num, den = zeta_open([1], [], 7)
    assert num == [1] and den == [1, -49]
    num, den = zeta_open([1, 3], [1, 2], 7)
    assert num == pmul([1, -7], [1, 0, -49])
    assert den == pmul([1, 3], [1, -49])
    num, den = zeta_curves_C([], 7)
    assert num == [1] and den == pmul([1, -1], [1, -7])
    fib = FiberFactor(degree=2, delta=-1, P=[1], factor=[1, 0, 1])
    assert fib.Phi == [1, 0, -1]
    num, den = zeta_curves_C([fib], 7)
    assert num == [1, 0, -1]
    assert den == pprod([[1, -1], [1, -7], [1, 0, -49]])


def test_q2_reciprocal():
    assert q2_reciprocal([1, 1], 3) == [1, 9]
    assert q2_reciprocal([2, 0, 1], 3) == [1, 0, 162]


def random_weight_two(rng, q):
    """Product of ``1 - a T + q^2 T^2`` (|a| <= 2q) and factors ``1 +- qT``; returns (w, eps)."""
    w, eps = [1], 1
    for _ in range(rng.randint(1, 5)):
        a = rng.randint(-2 * q, 2 * q)
        w = pmul(w, [1, -a, q * q])
    for _ in range(rng.randint(0, 3)):
        s = rng.choice([1, -1])
        w = pmul(w, [1, -s * q])
        if s == 1:
            eps = -eps
    return w, eps


def test_complete_weil_recovers_twenty():
    rng = random.Random(31337)
    tie_broken = 0
    for case in range(20):
        q = rng.choice([3, 5, 7, 11, 13, 17])
        w, eps = random_weight_two(rng, q)
        D = len(w) - 1
        assert is_weight_two(w, q, tol=1e-9)
        prefix = w[:D // 2 + 1]
        try:
            got, e, how = complete_weil(prefix, D, q)
        except WeilDisambiguationFailed:
            # both signs are Weil: break the tie with p-adic knowledge of the full polynomial
            # at the separating precision, as the pipeline does
            need = separating_precision(prefix, D, q)
            mod = q ** need
            got, e, how = complete_weil(
                prefix, D, q, consistent=lambda c: all((x - y) % mod == 0 for x, y in zip(c, w)))
            tie_broken += 1
        assert got == w and e == eps, case
    assert tie_broken < 20


@given(st.integers(0, 10 ** 6), st.sampled_from([3, 5, 7]))
def test_completion_satisfies_functional_equation(seed, q):
    w, _ = random_weight_two(random.Random(seed), q)
    D = len(w) - 1
    try:
        got, eps, _ = complete_weil(w[:D // 2 + 1], D, q)
    except WeilDisambiguationFailed:
        return
    assert got == w
    assert all(got[D - i] == eps * Fraction(q) ** (D - 2 * i) * got[i] for i in range(D + 1))
    assert all(abs(c) <= bnd for c, bnd in zip(got, weil_bounds(D, q)))


def test_complete_weil_trivial_degree():
    assert complete_weil([1], 0, 7) == ([1], 1, "trivial")


def test_weight_test_rejects_off_circle():
    assert not is_weight_two([1, -1], 7)
    assert is_weight_two([1, -7], 7)
    assert not is_weight_two([1, 0, 50], 7)


def test_separating_precision_formula():
    # candidates differ by 2 q^(D - 2i) a_i in coefficient D - i
    # D = 3: coefficient 3 differs by 2 q^3, coefficient 2 by 2 q a_1 = 30
    assert separating_precision([1, 3], 3, 5) == min(3, vp(30, 5)) + 1
    assert separating_precision([1, 0], 3, 5) == 4


def test_factor_over_z():
    f = pprod([[1, -7], [1, -7], [1, 2, 49]])
    facs = factor_over_Z(f)
    assert ([1, -7], 2) in facs and ([1, 2, 49], 1) in facs
