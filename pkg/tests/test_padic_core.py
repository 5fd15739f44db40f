import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from fibzeta.errors import InsufficientPrecision, LiftOutOfBounds
from fibzeta.padic import (INF, PadicApprox, PadicMatrix, adjugate, berkowitz, berkowitz_mod,
                           charpoly_division_free, exact_div, symmetric_lift, symmetric_residue, vp)
from fibzeta.polyarith import (RadixBase, divmod_monic, mul, mul_trunc, qdivmod, qgcdex, qinvmod,
                               qmul, series_inv, to_residues, trim)

PRIMES = st.sampled_from([2, 3, 5, 7, 11, 17])
nonzero = st.integers(-10**12, 10**12).filter(bool)


def naive_mul(a, b, m):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return trim([c % m for c in out])


# valuations and exact division -----------------------------------------------------


def test_vp_basics():
    assert vp(0, 5) == INF
    assert vp(250, 5) == 3
    assert vp(Fraction(7, 50), 5) == -2


@given(PRIMES, nonzero, st.integers(0, 6))
def test_vp_multiplicative(p, x, k):
    assert vp(x * p ** k, p) == vp(x, p) + k


def test_exact_div_raises_when_not_divisible():
    assert exact_div(49 * 3, 49) == 3
    with pytest.raises(InsufficientPrecision):
        exact_div(50, 49)


# PadicApprox against exact rationals ------------------------------------------------------


fracs = st.fractions(max_denominator=10**4).filter(lambda x: x != 0)


@given(PRIMES, fracs, fracs, st.integers(5, 30))
def test_padic_ring_ops_match_rationals(p, x, y, N):
    a = PadicApprox.from_rational(x, p, N)
    b = PadicApprox.from_rational(y, p, N)
    for op, exact in (("+", x + y), ("-", x - y), ("*", x * y)):
        got = {"+": a + b, "-": a - b, "*": a * b}[op]
        if got.is_zero:
            # vanishes to the available precision
            assert exact == 0 or vp(exact, p) >= got.N
            continue
        diff = got.to_fraction() - exact
        assert diff == 0 or vp(diff, p) >= got.N
        floor = N if op != "*" else N + min(vp(x, p), vp(y, p), 0)
        assert got.N >= floor


@given(PRIMES, fracs, fracs)
def test_padic_division(p, x, y):
    a = PadicApprox.from_rational(x, p, 25)
    b = PadicApprox.from_rational(y, p, 25)
    if b.is_zero:
        with pytest.raises(InsufficientPrecision):
            a / b
        return
    q = a / b
    diff = q.to_fraction() - x / y
    assert diff == 0 or vp(diff, p) >= q.N


def test_padic_exact_mode():
    a = PadicApprox.from_rational(Fraction(3, 7), 7)
    assert a.N == INF and a.v == -1
    assert (a * 7).to_fraction() == 3


# characteristic polynomials -------------------------------------------------------------


@pytest.mark.parametrize("seed", range(8))
def test_berkowitz_matches_sympy(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 6)
    M = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(n)]
    T = sympy.symbols("T")
    ref = sympy.Matrix(M).charpoly(T).all_coeffs()
    assert berkowitz(M) == [int(c) for c in ref]
    assert charpoly_division_free(M) == [int(c) for c in ref][::-1]
    mod = 7 ** 5
    assert berkowitz_mod(M, mod) == [int(c) % mod for c in ref]


@pytest.mark.parametrize("seed", range(4))
def test_adjugate_identity(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 5)
    M = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(n)]
    A = adjugate(M, 1, 0)
    det = int(sympy.Matrix(M).det())
    prod = [[sum(M[i][k] * A[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    assert prod == [[det if i == j else 0 for j in range(n)] for i in range(n)]


def test_charpoly_padic_matrix():
    p = 5
    rows = [[PadicApprox.from_rational(x, p, 10) for x in r] for r in [[1, 5], [Fraction(1, 5), 2]]]
    c = charpoly_division_free(PadicMatrix(rows, p))
    # det(T - M) = T^2 - 3T + 1
    assert [x.to_fraction() % 5 ** 8 for x in c.coeffs] == [1, -3 % 5 ** 8, 1]


# lifting -------------------------------------------------------------------------------


def test_symmetric_lift():
    a = PadicApprox.from_rational(-30, 7, 4)
    assert symmetric_lift(a, 100) == -30
    with pytest.raises(LiftOutOfBounds):
        symmetric_lift(a, 10)
    with pytest.raises(LiftOutOfBounds):
        symmetric_lift(PadicApprox.from_rational(3, 7, 1), 10)
    assert symmetric_residue(7 ** 3 - 2, 7 ** 3) == -2


# polynomial arithmetic -----------------------------------------------------------------

polys = st.lists(st.integers(-10**6, 10**6), min_size=1, max_size=30)


@given(polys, polys, st.sampled_from([7 ** 5, 5 ** 20, 2 ** 61 - 1]))
def test_kronecker_mul_matches_schoolbook(a, b, m):
    a = [x % m for x in a]
    b = [x % m for x in b]
    assert trim(mul(a, b, m)) == naive_mul(a, b, m)
    n = max(1, len(a) // 2)
    assert trim(mul_trunc(a, b, n, m)) == trim(naive_mul(a, b, m)[:n])


@given(polys, st.integers(1, 40))
def test_series_inverse(f, n):
    m = 7 ** 10
    f = [1] + [x % m for x in f]
    inv = series_inv(f, n, m)
    prod = naive_mul(f, inv, m)[:n]
    assert trim(prod) == [1]


@given(polys, st.lists(st.integers(-50, 50), min_size=1, max_size=8))
def test_divmod_monic(a, b):
    m = 5 ** 12
    a = [x % m for x in a]
    b = [x % m for x in b] + [1]
    q, r = divmod_monic(a, b, m)
    assert len(trim(r)) < len(b)
    back = [(x + (r[i] if i < len(r) else 0)) % m
            for i, x in enumerate(naive_mul(q, b, m) + [0] * len(a))]
    assert trim(back) == trim(a)


@given(st.lists(st.lists(st.integers(0, 10**6), min_size=3, max_size=3), min_size=1, max_size=12),
       st.lists(st.integers(-9, 9), min_size=3, max_size=3))
def test_radix_roundtrip(digits, r):
    m = 7 ** 9
    r = [x % m for x in r] + [1]
    base = RadixBase(r, m)
    digits = [[x % m for x in d] for d in digits]
    P = base.from_digits(digits)
    back = base.to_digits(P, len(digits))
    assert [trim(d) for d in back] == [trim(d) for d in digits]


def test_rational_gcdex_and_inverse():
    a = [Fraction(x) for x in (1, 0, 1)]
    b = [Fraction(x) for x in (-1, 1)]
    s, t, g = qgcdex(a, b)
    lhs = [x + y for x, y in zip(qmul(s, a) + [0] * 4, qmul(t, b) + [0] * 4)]
    while lhs and lhs[-1] == 0:
        lhs.pop()
    assert lhs == g == [1]
    r = [Fraction(x) for x in (2, 0, 0, 1)]
    inv = qinvmod(a, r)
    assert qdivmod(qmul(inv, a), r)[1] == [1]
    assert to_residues([Fraction(1, 2)], 7) == [4]
