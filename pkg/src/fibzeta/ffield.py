"""Finite fields, exhaustive point counts and the zeta/count dictionary.

This module is the independent oracle for the p-adic pipeline: nothing here
uses p-adic arithmetic.
"""

from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from functools import lru_cache
import itertools

import sympy

from . import _kernels
from .errors import EnumerationTooLarge, FiberNotNodal, InconsistentZeta, NotSquarefree

MAX_ENUMERATION = 10 ** 9


# F_p[x] helpers (lists, lowest degree first) -----------------------------------

def _fp_trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _sympy_poly(coeffs, p):
    x = sympy.Symbol("x")
    return sympy.Poly(list(reversed([c % p for c in coeffs])) or [0], x, modulus=p)


def _from_sympy(P, p):
    return [int(c) % p for c in reversed(P.all_coeffs())]


def is_irreducible_mod_p(coeffs, p):
    return _sympy_poly(coeffs, p).is_irreducible


@lru_cache(maxsize=None)
def least_irreducible(p, s):
    """Monic irreducible of degree ``s`` over F_p whose coefficient vector, read as a
    base-p integer with the constant term least significant, is smallest."""
    for idx in range(p ** s):
        low = [(idx // p ** i) % p for i in range(s)]
        cand = low + [1]
        if s == 1 or (low[0] != 0 and is_irreducible_mod_p(cand, p)):
            return tuple(cand)
    raise ValueError("no irreducible polynomial found")


class FqField:
    """F_p[t]/(modulus). Elements are tuples of ``s`` residues."""

    def __init__(self, p, modulus=None, s=None):
        if modulus is None:
            modulus = least_irreducible(p, s)
        modulus = [c % p for c in modulus]
        inv = pow(modulus[-1], -1, p)
        self.p = p
        self.modulus = tuple(c * inv % p for c in modulus)
        self.s = len(self.modulus) - 1
        self.q = p ** self.s

    def __repr__(self):
        return f"FqField(p={self.p}, modulus={list(self.modulus)})"

    def __eq__(self, other):
        return isinstance(other, FqField) and (self.p, self.modulus) == (other.p, other.modulus)

    def __hash__(self):
        return hash((self.p, self.modulus))

    def __call__(self, c):
        if isinstance(c, FqElement):
            return c
        if isinstance(c, (tuple, list)):
            v = [x % self.p for x in c] + [0] * self.s
            return FqElement(self, tuple(v[: self.s]))
        return FqElement(self, (c % self.p,) + (0,) * (self.s - 1))

    def gen(self):
        return self((0, 1)) if self.s > 1 else self(-self.modulus[0])

    def zero(self):
        return self(0)

    def one(self):
        return self(1)

    def elements(self):
        for t in itertools.product(range(self.p), repeat=self.s):
            yield FqElement(self, tuple(reversed(t)))

    def _reduce(self, c):
        c = list(c)
        s = self.s
        m = self.modulus
        p = self.p
        for i in range(len(c) - 1, s - 1, -1):
            a = c[i] % p
            if a:
                for j in range(s):
                    c[i - s + j] = (c[i - s + j] - a * m[j]) % p
            c[i] = 0
        c = [x % p for x in c[:s]] + [0] * (s - len(c[:s]))
        return tuple(c)

    # discrete logarithm tables -------------------------------------------------
    def log_tables(self):
        """Return ``(exp, log, zech)``; indices encode elements as base-p integers."""
        return _log_tables(self.p, self.modulus)


@lru_cache(maxsize=32)
def _log_tables(p, modulus):
    F = FqField(p, modulus)
    q = F.q
    factors = list(sympy.factorint(q - 1))

    def power(e, k):
        r, base = F.one(), e
        while k:
            if k & 1:
                r = r * base
            base = base * base
            k >>= 1
        return r

    prim = None
    for e in F.elements():
        if e.is_zero():
            continue
        if all(power(e, (q - 1) // f) != F.one() for f in factors):
            prim = e
            break
    exp = [0] * (q - 1)
    log = [-1] * q
    cur = F.one()
    for k in range(q - 1):
        idx = cur.index
        exp[k] = idx
        log[idx] = k
        cur = cur * prim
    zech = [-1] * (q - 1)
    for k in range(q - 1):
        e = exp[k]
        lo = e % p
        e1 = e - lo + (lo + 1) % p
        zech[k] = log[e1]
    return exp, log, zech


class FqElement:
    __slots__ = ("F", "c")

    def __init__(self, F, c):
        self.F = F
        self.c = c

    @property
    def index(self):
        p = self.F.p
        return sum(x * p ** i for i, x in enumerate(self.c))

    def is_zero(self):
        return not any(self.c)

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.F(other)
        return isinstance(other, FqElement) and self.F == other.F and self.c == other.c

    def __hash__(self):
        return hash((self.F, self.c))

    def __repr__(self):
        return f"Fq{list(self.c)}"

    def _lift(self, o):
        return o if isinstance(o, FqElement) else self.F(o)

    def __add__(self, o):
        o = self._lift(o)
        p = self.F.p
        return FqElement(self.F, tuple((a + b) % p for a, b in zip(self.c, o.c)))

    __radd__ = __add__

    def __sub__(self, o):
        o = self._lift(o)
        p = self.F.p
        return FqElement(self.F, tuple((a - b) % p for a, b in zip(self.c, o.c)))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __neg__(self):
        p = self.F.p
        return FqElement(self.F, tuple((-a) % p for a in self.c))

    def __mul__(self, o):
        o = self._lift(o)
        s = self.F.s
        prod = [0] * (2 * s - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(o.c):
                    prod[i + j] += a * b
        return FqElement(self.F, self.F._reduce(prod))

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        r, base = self.F.one(), self
        while k:
            if k & 1:
                r = r * base
            base = base * base
            k >>= 1
        return r

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in F_q")
        return self ** (self.F.q - 2)

    def __truediv__(self, o):
        return self * self._lift(o).inverse()


def is_square(a):
    """Euler's criterion in F_q (q odd). Zero counts as a square."""
    if a.is_zero():
        return True
    return a ** ((a.F.q - 1) // 2) == a.F.one()


# polynomials over F_q ------------------------------------------------------------

def _ptrim(a):
    a = list(a)
    while a and a[-1].is_zero():
        a.pop()
    return a


def poly_divmod(a, b):
    a, b = _ptrim(a), _ptrim(b)
    if not b:
        raise ZeroDivisionError("division by zero polynomial")
    inv = b[-1].inverse()
    r = list(a)
    q = [b[0].F.zero()] * max(len(a) - len(b) + 1, 0)
    for i in range(len(a) - len(b), -1, -1):
        c = r[i + len(b) - 1] * inv
        q[i] = c
        if not c.is_zero():
            for j in range(len(b)):
                r[i + j] = r[i + j] - c * b[j]
    return _ptrim(q), _ptrim(r[: len(b) - 1])


def poly_gcd(a, b):
    a, b = _ptrim(a), _ptrim(b)
    while b:
        a, b = b, poly_divmod(a, b)[1]
    if a:
        inv = a[-1].inverse()
        a = [c * inv for c in a]
    return a


def poly_deriv(a):
    return _ptrim([a[i] * i for i in range(1, len(a))])


def poly_eval(a, x):
    acc = x.F.zero()
    for c in reversed(a):
        acc = acc * x + c
    return acc


def unique_double_point(f):
    """For a nodal fibre polynomial ``f`` over F_q return ``(alpha, H, delta)``.

    ``f = (X - alpha)^2 H`` with ``H(alpha) != 0``; ``delta = -1`` when ``H(alpha)``
    is a square and ``+1`` otherwise.
    """
    f = _ptrim(f)
    g = poly_gcd(f, poly_deriv(f))
    if len(g) != 2:
        raise FiberNotNodal("fiber not nodal: expected exactly one double root", gcd_degree=len(g) - 1)
    alpha = -g[0]
    lin = [-alpha, alpha.F.one()]
    h, r = poly_divmod(f, [c for c in _pmul(lin, lin)])
    if r:
        raise FiberNotNodal("fiber not nodal")
    h_alpha = poly_eval(h, alpha)
    if h_alpha.is_zero():
        raise FiberNotNodal("fiber not nodal: root of multiplicity above two")
    delta = -1 if is_square(h_alpha) else 1
    return alpha, h, delta


def _pmul(a, b):
    F = (a or b)[0].F
    out = [F.zero()] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


# factorisation over F_p -------------------------------------------------------

def factor_squarefree_mod_p(f, p):
    """Monic irreducible factors of a squarefree ``f`` over F_p, sorted by (degree, coefficients)."""
    P = _sympy_poly(f, p)
    if P.degree() <= 0:
        return []
    if P.gcd(P.diff()).degree() > 0:
        raise NotSquarefree("not squarefree modulo p", p=p)
    _, facs = P.factor_list()
    out = []
    for fac, e in facs:
        c = _from_sympy(fac.monic(), p)
        out.extend([c] * e)
    out.sort(key=lambda c: (len(c), c[::-1]))
    return out


# surface point counts ----------------------------------------------------------

def _monomials_in(Qbar, F):
    _, log, _ = F.log_tables()
    ma, mb, mc = [], [], []
    for (a, b), c in sorted(Qbar.items()):
        c %= F.p
        if c:
            ma.append(a)
            mb.append(b)
            mc.append(log[c])
    return ma, mb, mc


def count_affine_surface(Qbar, p, s, workers=1):
    """``#{(x, gamma, z) in F_q^3 : z^2 = Qbar(x, gamma)}`` with ``q = p^s``.

    ``Qbar`` maps ``(a, b)`` to the coefficient of ``X^a Gamma^b``.
    """
    q = p ** s
    if q * q > MAX_ENUMERATION:
        raise EnumerationTooLarge("enumeration too large", p=p, s=s)
    F = FqField(p, s=s)
    _, _, zech = F.log_tables()
    ma, mb, mc = _monomials_in(Qbar, F)
    if not ma:
        return q * q
    if workers <= 1:
        return _kernels.count_points(ma, mb, mc, q, zech)
    bounds = [q * i // workers for i in range(workers + 1)]
    with ThreadPoolExecutor(workers) as ex:
        parts = ex.map(lambda i: _kernels.count_points(ma, mb, mc, q, zech, bounds[i], bounds[i + 1]),
                       range(workers))
        return sum(parts)


def count_affine_surface_naive(Qbar, p, s):
    """Quadratic-character sum evaluated element by element (slow reference)."""
    F = FqField(p, s=s)
    els = list(F.elements())
    total = 0
    for x in els:
        for g in els:
            v = F.zero()
            for (a, b), c in Qbar.items():
                v = v + F(c) * x ** a * g ** b
            total += 1 if v.is_zero() else (2 if is_square(v) else 0)
    return total


# zeta functions <-> point counts ------------------------------------------------

def _series_div(num, den, n):
    num = [Fraction(c) for c in num] + [Fraction(0)] * n
    out = []
    for k in range(n):
        acc = num[k] - sum(out[j] * den[k - j] for j in range(max(0, k - len(den) + 1), k))
        out.append(acc / den[0])
    return out


def counts_from_zeta(num, den, s_max):
    """Point counts ``N_1..N_smax`` of a zeta function ``num/den`` (integer polynomials,
    constant term 1)."""
    n = s_max + 1
    dnum = [i * c for i, c in enumerate(num)][1:]
    dden = [i * c for i, c in enumerate(den)][1:]
    a = _series_div(dnum, num, n)
    b = _series_div(dden, den, n)
    counts = []
    for s in range(1, s_max + 1):
        v = a[s - 1] - b[s - 1]
        if v.denominator != 1:
            raise InconsistentZeta("inconsistent zeta: non-integral point count", s=s, value=v)
        counts.append(int(v))
    return counts


def zeta_from_counts(counts):
    """Power series coefficients ``Z_0..Z_n`` of ``exp(sum N_s T^s / s)``."""
    n = len(counts)
    z = [Fraction(1)]
    for k in range(1, n + 1):
        z.append(sum(counts[j - 1] * z[k - j] for j in range(1, k + 1)) / Fraction(k))
    for c in z:
        if c.denominator != 1:
            raise InconsistentZeta("inconsistent zeta: non-integral coefficient", value=c)
    return [int(c) for c in z]
