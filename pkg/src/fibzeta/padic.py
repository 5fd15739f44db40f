"""Finite-precision p-adic numbers, polynomials, matrices and division-free linear algebra.

A ``PadicApprox`` stores ``p^v * u`` where ``u`` is a unit known modulo
``p^(N - v)``; ``N`` is the absolute precision. A value that is zero to its
precision has ``v == N`` and ``u == 0``. Exact values use ``N = inf``.

The hot kernels of the pipeline do not use this class: they work on plain
integer residues modulo a fixed power of ``p`` (see ``vp``/``exact_div``).
"""

import math
from fractions import Fraction

from .errors import InsufficientPrecision, LiftOutOfBounds

INF = math.inf


def vp(x, p):
    """p-adic valuation of a nonzero integer or Fraction (inf for zero)."""
    if not x:
        return INF
    if isinstance(x, Fraction):
        return vp(x.numerator, p) - vp(x.denominator, p)
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def exact_div(x, pk):
    q, r = divmod(x, pk)
    if r:
        raise InsufficientPrecision("scaled residue not divisible; increase the working headroom",
                                    divisor=pk)
    return q


def _mod(x, p, rel):
    return x if rel == INF else x % p ** rel


class PadicApprox:
    __slots__ = ("p", "N", "v", "u")

    def __init__(self, p, N, v, u):
        self.p, self.N, self.v, self.u = p, N, v, u

    # constructors
    @classmethod
    def from_rational(cls, x, p, N=INF):
        x = Fraction(x)
        if x == 0:
            return cls.zero(p, N)
        v = vp(x, p)
        unit = x / Fraction(p) ** v
        if N == INF:
            if unit.denominator != 1:
                n = unit.numerator
                d = unit.denominator
                return cls(p, INF, v, Fraction(n, d))
            return cls(p, INF, v, int(unit))
        if v >= N:
            return cls.zero(p, N)
        rel = N - v
        pr = p ** rel
        return cls(p, N, v, unit.numerator * pow(unit.denominator, -1, pr) % pr)

    @classmethod
    def zero(cls, p, N=INF):
        return cls(p, N, N, 0)

    @property
    def is_zero(self):
        return self.u == 0

    @property
    def relprec(self):
        return self.N - self.v

    def residue(self, N=None):
        """Integer representative modulo ``p^N``; only defined for ``v >= 0``."""
        N = self.N if N is None else N
        if self.is_zero:
            return 0
        if self.v < 0:
            raise InsufficientPrecision("negative valuation has no integral residue", a=self)
        u = self.u
        if isinstance(u, Fraction):
            u = u.numerator * pow(u.denominator, -1, self.p ** N)
        return u * self.p ** self.v % self.p ** N

    def __repr__(self):
        p = self.p
        if self.is_zero:
            return f"0 mod {p}^{self.N}"
        rel = "inf" if self.N == INF else self.N - self.v
        return f"{p}^{self.v} * {self.u} mod {p}^{rel}"

    def __eq__(self, other):
        if not isinstance(other, PadicApprox):
            return NotImplemented
        return (self.p, self.N, self.v, self.u) == (other.p, other.N, other.v, other.u)

    def __hash__(self):
        return hash((self.p, self.N, self.v, self.u))

    def to_fraction(self):
        return Fraction(self.p) ** self.v * self.u if not self.is_zero else Fraction(0)

    def __add__(self, o):
        return arith(self, _coerce(o, self.p), "+")

    __radd__ = __add__

    def __sub__(self, o):
        return arith(self, _coerce(o, self.p), "-")

    def __rsub__(self, o):
        return arith(_coerce(o, self.p), self, "-")

    def __mul__(self, o):
        return arith(self, _coerce(o, self.p), "*")

    __rmul__ = __mul__

    def __truediv__(self, o):
        return arith(self, _coerce(o, self.p), "/")

    def __neg__(self):
        if self.is_zero:
            return self
        u = -self.u if self.N == INF else (-self.u) % self.p ** (self.N - self.v)
        return PadicApprox(self.p, self.N, self.v, u)


def _coerce(x, p):
    if isinstance(x, PadicApprox):
        return x
    return PadicApprox.from_rational(x, p)


def _from_scaled(p, base, s, N):
    """Value ``p^base * s`` (s an int or Fraction unit-free) known to absolute precision N."""
    if s == 0:
        return PadicApprox.zero(p, N)
    w = vp(s, p)
    v = base + w
    if v >= N:
        return PadicApprox.zero(p, N)
    u = Fraction(s) / Fraction(p) ** w
    if N == INF:
        return PadicApprox(p, INF, v, int(u) if u.denominator == 1 else u)
    pr = p ** (N - v)
    return PadicApprox(p, N, v, u.numerator * pow(u.denominator, -1, pr) % pr)


def arith(a, b, op):
    """Interval arithmetic on ``PadicApprox``. ``op`` is one of ``+ - * /``."""
    if a.p != b.p:
        raise ValueError("mismatched primes")
    p = a.p
    if op in "+-":
        N = min(a.N, b.N)
        if b.is_zero and b.N == INF:
            return a if op == "+" else a
        sgn = 1 if op == "+" else -1
        if a.is_zero and b.is_zero:
            return PadicApprox.zero(p, N)
        if a.is_zero:
            return _from_scaled(p, b.v, sgn * Fraction(b.u), N)
        if b.is_zero:
            return _from_scaled(p, a.v, Fraction(a.u), N)
        base = min(a.v, b.v)
        s = Fraction(a.u) * Fraction(p) ** (a.v - base) + sgn * Fraction(b.u) * Fraction(p) ** (b.v - base)
        return _from_scaled(p, base, s, N)
    if op == "*":
        if a.is_zero or b.is_zero:
            if a.is_zero and b.is_zero:
                return PadicApprox.zero(p, a.N + b.N)
            z, o = (a, b) if a.is_zero else (b, a)
            return PadicApprox.zero(p, z.N + o.v)
        v = a.v + b.v
        N = v + min(a.N - a.v, b.N - b.v)
        return _from_scaled(p, v, Fraction(a.u) * Fraction(b.u), N)
    if op == "/":
        if b.is_zero:
            raise InsufficientPrecision("insufficient precision: division by a value that is zero "
                                        "to its precision", a=a, b=b)
        if a.is_zero:
            return PadicApprox.zero(p, a.N - b.v)
        v = a.v - b.v
        N = v + min(a.N - a.v, b.N - b.v)
        return _from_scaled(p, v, Fraction(a.u) / Fraction(b.u), N)
    raise ValueError(f"unknown op {op!r}")


class PadicPoly:
    """Polynomial with ``PadicApprox`` coefficients, lowest degree first."""

    def __init__(self, coeffs, p):
        self.p = p
        cs = [_coerce(c, p) for c in coeffs]
        while cs and cs[-1].is_zero and cs[-1].N == INF:
            cs.pop()
        self.coeffs = cs

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else -INF

    def __getitem__(self, i):
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return PadicApprox.zero(self.p)

    def __repr__(self):
        return f"PadicPoly({self.coeffs!r})"


class PadicMatrix:
    def __init__(self, rows, p):
        self.p = p
        self.rows = [[_coerce(x, p) for x in row] for row in rows]

    @property
    def shape(self):
        return len(self.rows), len(self.rows[0]) if self.rows else 0

    def precision_floor(self):
        return min((x.N for row in self.rows for x in row), default=INF)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]


def berkowitz(M, one=1):
    """Coefficients ``[1, c1, ..., cn]`` of ``det(T*I - M) = T^n + c1 T^(n-1) + ... + cn``.

    Division free, so it works over any commutative ring whose elements support
    ``+``, ``-`` and ``*`` (ints, Fractions, residue polynomials, PadicApprox).
    """
    n = len(M)
    if n == 0:
        return [one]
    vect = [one, -M[0][0]]
    for k in range(1, n):
        a = M[k][k]
        R = [M[k][j] for j in range(k)]
        X = [M[i][k] for i in range(k)]
        col = [one, -a]
        for _ in range(k):
            acc = R[0] * X[0]
            for j in range(1, k):
                acc = acc + R[j] * X[j]
            col.append(-acc)
            X = [_dot([M[i][j] for j in range(k)], X) for i in range(k)]
        new = []
        for i in range(k + 2):
            acc = None
            for j in range(max(0, i - len(col) + 1), min(i, k) + 1):
                t = col[i - j] * vect[j]
                acc = t if acc is None else acc + t
            new.append(acc)
        vect = new
    return vect


def _dot(row, vec):
    acc = row[0] * vec[0]
    for j in range(1, len(row)):
        acc = acc + row[j] * vec[j]
    return acc


def matmul(A, B):
    n, k, m = len(A), len(B), len(B[0])
    return [[_dot(A[i], [B[t][j] for t in range(k)]) for j in range(m)] for i in range(n)]


def adjugate(M, one=1, zero=0):
    """Adjugate via Cayley-Hamilton on the Berkowitz coefficients (division free)."""
    n = len(M)
    c = berkowitz(M, one)
    if n == 1:
        return [[one]]
    # Horner: M^(n-1) + c1 M^(n-2) + ... + c_(n-1) I
    acc = [[(one if i == j else zero) for j in range(n)] for i in range(n)]
    for t in range(1, n):
        acc = matmul(acc, M)
        for i in range(n):
            acc[i][i] = acc[i][i] + c[t]
    if n % 2 == 0:
        acc = [[-x for x in row] for row in acc]
    return acc


def charpoly_division_free(M):
    """Characteristic polynomial ``det(T - M)`` as a coefficient list, lowest degree first."""
    rows = M.rows if isinstance(M, PadicMatrix) else M
    if isinstance(M, PadicMatrix):
        one = PadicApprox.from_rational(1, M.p)
    else:
        one = 1
    c = berkowitz(rows, one)
    out = c[::-1]
    if isinstance(M, PadicMatrix):
        return PadicPoly(out, M.p)
    return out


def berkowitz_mod(M, m):
    """``berkowitz`` over ``Z/m`` with integer entries; returns residues."""
    n = len(M)
    if n == 0:
        return [1 % m]
    vect = [1 % m, (-M[0][0]) % m]
    for k in range(1, n):
        a = M[k][k]
        R = M[k][:k]
        sub = [row[:k] for row in M[:k]]
        X = [M[i][k] for i in range(k)]
        col = [1, -a % m]
        for _ in range(k):
            col.append(-sum(r * x for r, x in zip(R, X)) % m)
            X = [sum(r * x for r, x in zip(row, X)) % m for row in sub]
        new = []
        for i in range(k + 2):
            lo = max(0, i - len(col) + 1)
            hi = min(i, k)
            new.append(sum(col[i - j] * vect[j] for j in range(lo, hi + 1)) % m)
        vect = new
    return vect


def symmetric_lift(a, bound):
    """Lift a residue to the unique integer in ``(-p^N/2, p^N/2)`` and check ``|x| <= bound``.

    ``a`` is a ``PadicApprox`` with ``v >= 0``.
    """
    if a.N == INF:
        x = a.to_fraction()
        if x.denominator != 1 or abs(x) > bound:
            raise LiftOutOfBounds("lift out of bounds", value=a, bound=bound)
        return int(x)
    mod = a.p ** a.N
    if mod <= 2 * bound:
        raise LiftOutOfBounds("lift out of bounds: modulus too small for the bound", value=a,
                              bound=bound)
    x = a.residue() % mod
    if x > mod // 2:
        x -= mod
    if abs(x) > bound:
        raise LiftOutOfBounds("lift out of bounds", value=a, bound=bound)
    return x


def symmetric_residue(x, mod):
    x %= mod
    return x - mod if x > mod // 2 else x
