import random

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from fibzeta import _kernels, ffield
from fibzeta.errors import EnumerationTooLarge, FiberNotNodal, NotSquarefree
from fibzeta.ffield import (FqField, count_affine_surface, count_affine_surface_naive,
                            counts_from_zeta, factor_squarefree_mod_p, is_square, unique_double_point,
                            zeta_from_counts)

from conftest import SURFACE_P5, SURFACE_P7

F25 = FqField(5, s=2)
F27 = FqField(3, s=3)


def elements(F):
    return st.builds(lambda t: F(list(t)), st.tuples(*[st.integers(0, F.p - 1)] * F.s))


@given(elements(F25), elements(F25), elements(F25))
def test_field_axioms_f25(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * (b * c) == (a * b) * c
    if not a.is_zero():
        assert a * a.inverse() == F25.one()


@given(elements(F27))
def test_frobenius_fixes_prime_field_only(a):
    assert (a ** 3 == a) == (a.c[1:] == (0, 0))


def test_squares_count():
    F = FqField(7, s=2)
    nz = [x for x in F.elements() if not x.is_zero()]
    assert sum(1 for x in nz if is_square(x)) == (F.q - 1) // 2


@pytest.mark.parametrize("Q,p,s", [
    ({(3, 0): 1, (0, 3): 1, (0, 0): 1}, 3, 1),
    (SURFACE_P5, 5, 1),
    (SURFACE_P5, 5, 2),
    (SURFACE_P7, 7, 1),
    ({(3, 0): 1, (1, 1): 2, (0, 5): 1, (0, 0): 4}, 3, 2),
])
def test_count_matches_naive(Q, p, s):
    Qbar = {k: v % p for k, v in Q.items() if v % p}
    assert count_affine_surface(Qbar, p, s) == count_affine_surface_naive(Qbar, p, s)


def test_count_threads_agree():
    Qbar = {k: v % 7 for k, v in SURFACE_P7.items() if v % 7}
    assert count_affine_surface(Qbar, 7, 2, workers=3) == count_affine_surface(Qbar, 7, 2)


@pytest.mark.parametrize("seed", range(5))
def test_numba_and_numpy_kernels_agree(seed):
    rng = random.Random(seed)
    F = FqField(5, s=2)
    _, _, zech = F.log_tables()
    k = rng.randint(1, 5)
    ma = [rng.randint(0, 4) for _ in range(k)]
    mb = [rng.randint(0, 4) for _ in range(k)]
    mc = [rng.randint(0, F.q - 2) for _ in range(k)]
    args = (np.array(ma, np.int64), np.array(mb, np.int64), np.array(mc, np.int64), F.q,
            np.array(zech, np.int64), 0, F.q)
    ref = _kernels.count_points_python(*args)
    assert _kernels._count_numpy(*args) == ref
    assert _kernels.count_points(*args) == ref


def test_enumeration_guard():
    with pytest.raises(EnumerationTooLarge):
        count_affine_surface({(0, 0): 1}, 7, 6)


def curve_count(coeffs, F):
    """Projective points of y^2 = f(x), f monic of odd degree."""
    n = 1
    for x in F.elements():
        v = ffield.poly_eval([F(c) for c in coeffs], x)
        n += 1 if v.is_zero() else (2 if is_square(v) else 0)
    return n


def test_counts_from_zeta_elliptic_curve():
    # y^2 = x^3 + 1 over F_7 has 12 points, so a_7 = -4
    p = 7
    num, den = [1, 4, 7], [1, -8, 7]
    pred = counts_from_zeta(num, den, 2)
    assert pred[0] == curve_count([1, 0, 0, 1], FqField(p, s=1))
    assert pred[1] == curve_count([1, 0, 0, 1], FqField(p, s=2))


@given(st.lists(st.integers(0, 50), min_size=1, max_size=6))
def test_zeta_counts_roundtrip_rational_surface(b):
    # P2 = (1 - qT)^k gives counts 1 + k q^s + q^(2s)
    q, k = 5, len(b)
    den = [1]
    for f in [[1, -1], [1, -q * q]] + [[1, -q]] * k:
        den = np.polynomial.polynomial.polymul(den, f).astype(object).tolist()
    den = [int(x) for x in den]
    counts = counts_from_zeta([1], den, 4)
    assert counts == [1 + k * q ** s + q ** (2 * s) for s in range(1, 5)]
    z = zeta_from_counts(counts)
    inv = [1]
    for n in range(1, 5):
        inv.append(-sum(den[j] * inv[n - j] for j in range(1, min(n, len(den) - 1) + 1)))
    assert z == inv


def test_factor_squarefree_matches_sympy():
    p = 11
    f = [3, 0, 5, 1, 0, 1]
    facs = factor_squarefree_mod_p(f, p)
    X = sympy.symbols("X")
    ref = sympy.Poly(list(reversed(f)), X, modulus=p).factor_list()[1]
    assert sorted(len(c) - 1 for c in facs) == sorted(g.degree() for g, _ in ref)
    prod = [1]
    for c in facs:
        prod = np.polynomial.polynomial.polymul(prod, c).astype(int).tolist()
    inv = pow(f[-1], -1, p)
    assert [int(x) % p for x in prod] == [c * inv % p for c in f]
    with pytest.raises(NotSquarefree):
        factor_squarefree_mod_p([1, 2, 1], p)


def test_unique_double_point():
    F = FqField(7, s=1)
    alpha = F(3)
    H = [F(2), F(0), F(1)]  # X^2 + 2
    lin = [-alpha, F(1)]
    f = ffield._pmul(ffield._pmul(lin, lin), H)
    a, h, delta = unique_double_point(f)
    assert a == alpha and h == H
    assert delta == (-1 if is_square(ffield.poly_eval(H, alpha)) else 1)
    with pytest.raises(FiberNotNodal):
        unique_double_point(ffield._pmul(f, lin))
