"""Dense univariate polynomials as coefficient lists (lowest degree first).

Two flavours live here: residue arithmetic modulo an integer ``m`` (hot paths,
coefficients kept in ``[0, m)``) and exact arithmetic over ``Fraction``.
Long products go through Kronecker substitution so that one big-integer
multiplication does all the work.
"""

from fractions import Fraction

try:
    import gmpy2

    _mpz = gmpy2.mpz
except ImportError:  # pragma: no cover
    gmpy2 = None
    _mpz = int

_SCHOOLBOOK = 24


def trim(a):
    n = len(a)
    while n and not a[n - 1]:
        n -= 1
    return a[:n] if n != len(a) else a


def deg(a):
    a = trim(a)
    return len(a) - 1 if a else -1


def add(a, b, m=None):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    if m is not None:
        out = [c % m for c in out]
    return out


def sub(a, b, m=None):
    n = max(len(a), len(b))
    out = [0] * n
    for i, c in enumerate(a):
        out[i] = c
    for i, c in enumerate(b):
        out[i] -= c
    if m is not None:
        out = [c % m for c in out]
    return out


def scale(a, c, m=None):
    if m is None:
        return [c * x for x in a]
    return [c * x % m for x in a]


def derivative(a, m=None):
    out = [i * a[i] for i in range(1, len(a))]
    if m is not None:
        out = [c % m for c in out]
    return out


def evaluate(a, x, m=None):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
        if m is not None:
            acc %= m
    return acc


def shift(a, k):
    return [0] * k + list(a) if a else []


def _pack(a, nbytes):
    return int.from_bytes(b"".join(int(c).to_bytes(nbytes, "little") for c in a), "little")


def _unpack(x, nbytes, count, m):
    buf = int(x).to_bytes(nbytes * count + nbytes, "little")
    if m is None:
        return [int.from_bytes(buf[i * nbytes:(i + 1) * nbytes], "little") for i in range(count)]
    return [int.from_bytes(buf[i * nbytes:(i + 1) * nbytes], "little") % m for i in range(count)]


def mul(a, b, m):
    """Product of two residue polynomials modulo ``m`` (coefficients in [0, m))."""
    if not a or not b:
        return []
    la, lb = len(a), len(b)
    if min(la, lb) <= _SCHOOLBOOK:
        out = [0] * (la + lb - 1)
        if la < lb:
            a, b, la, lb = b, a, lb, la
        for j, y in enumerate(b):
            if y:
                for i, x in enumerate(a):
                    out[i + j] += x * y
        return [c % m for c in out]
    bits = 2 * (m - 1).bit_length() + min(la, lb).bit_length() + 1
    nbytes = (bits + 7) // 8
    prod = _mpz(_pack(a, nbytes)) * _mpz(_pack(b, nbytes))
    return _unpack(prod, nbytes, la + lb - 1, m)


def mul_trunc(a, b, n, m):
    """Product truncated to the first ``n`` coefficients."""
    return mul(a[:n], b[:n], m)[:n]


def series_inv(f, n, m):
    """Inverse of the power series ``f`` modulo ``x^n``; ``f[0]`` must be a unit mod ``m``."""
    g = [pow(f[0], -1, m)]
    k = 1
    while k < n:
        k = min(2 * k, n)
        fg = mul_trunc(f, g, k, m)
        e = [(-c) % m for c in fg]
        e[0] = (e[0] + 2) % m
        g = mul_trunc(g, e, k, m)
    return g[:n] + [0] * (n - len(g[:n]))


def divmod_monic(a, b, m, inv_rev=None):
    """Quotient and remainder of ``a`` by the monic polynomial ``b`` modulo ``m``.

    ``inv_rev`` may supply a precomputed inverse of reversed ``b`` of sufficient length.
    """
    a = trim(list(a))
    db = len(b) - 1
    if len(a) <= db:
        return [], a
    k = len(a) - db
    if k <= _SCHOOLBOOK or db <= 2:
        r = list(a)
        q = [0] * k
        for i in range(k - 1, -1, -1):
            c = r[i + db] % m
            q[i] = c
            if c:
                for j in range(db):
                    r[i + j] = (r[i + j] - c * b[j]) % m
            r[i + db] = 0
        return q, [c % m for c in r[:db]]
    ra = a[::-1][:k]
    if inv_rev is None or len(inv_rev) < k:
        inv_rev = series_inv(b[::-1], k, m)
    q = mul_trunc(ra, inv_rev[:k], k, m)
    q = q + [0] * (k - len(q))
    q.reverse()
    qb = mul(q, b, m)
    r = [(a[i] - qb[i]) % m for i in range(db)]
    return q, r


def rem_monic(a, b, m):
    return divmod_monic(a, b, m)[1]


def mulmod(a, b, r, m):
    return divmod_monic(mul(a, b, m), r, m)[1]


class RadixBase:
    """Conversion between polynomials and their expansions in powers of a monic ``r``."""

    def __init__(self, r, m):
        self.r = [c % m for c in r]
        self.m = m
        self.d = len(r) - 1
        self._pow = {1: self.r}
        self._inv = {}

    def power(self, k):
        if k not in self._pow:
            h = k // 2
            self._pow[k] = mul(self.power(h), self.power(k - h), self.m)
        return self._pow[k]

    def _divmod_pow(self, P, k):
        b = self.power(k)
        need = len(P) - (len(b) - 1)
        inv = self._inv.get(k)
        if need > _SCHOOLBOOK and (inv is None or len(inv) < need):
            inv = series_inv(b[::-1], max(need, 2 * len(inv) if inv else need), self.m)
            self._inv[k] = inv
        return divmod_monic(P, b, self.m, inv)

    def to_digits(self, P, count):
        """Digits ``c_0..c_{count-1}`` (each of degree < d) with ``P = sum c_j r^j``.

        ``P`` must have degree below ``count*d``.
        """
        d = self.d
        if count <= 0:
            return []
        if count == 1:
            P = list(P[:d]) + [0] * (d - len(P[:d]))
            return [P]
        h = 1
        while 2 * h < count:
            h *= 2
        q, r = self._divmod_pow([c % self.m for c in P], h)
        return self.to_digits(r, h) + self.to_digits(q, count - h)

    def from_digits(self, digits):
        if not digits:
            return []
        if len(digits) == 1:
            return list(digits[0])
        h = 1
        while 2 * h < len(digits):
            h *= 2
        lo = self.from_digits(digits[:h])
        hi = self.from_digits(digits[h:])
        return add(lo, mul(hi, self.power(h), self.m), self.m)


# exact arithmetic over Q -------------------------------------------------------


def qtrim(a):
    return trim([Fraction(c) for c in a])


def qmul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return trim(out)


def qdivmod(a, b):
    a = qtrim(a)
    b = qtrim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    db = len(b) - 1
    lc = b[-1]
    if len(a) <= db:
        return [], a
    q = [Fraction(0)] * (len(a) - db)
    r = list(a)
    for i in range(len(a) - db - 1, -1, -1):
        c = r[i + db] / lc
        q[i] = c
        if c:
            for j in range(db + 1):
                r[i + j] -= c * b[j]
    return trim(q), trim(r[:db])


def qgcdex(a, b):
    """Return ``(s, t, g)`` with ``s*a + t*b = g`` and ``g`` monic."""
    r0, r1 = qtrim(a), qtrim(b)
    s0, s1 = [Fraction(1)], []
    t0, t1 = [], [Fraction(1)]
    while r1:
        q, r = qdivmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, qtrim(sub(s0, qmul(q, s1)))
        t0, t1 = t1, qtrim(sub(t0, qmul(q, t1)))
    lc = r0[-1]
    return [c / lc for c in s0], [c / lc for c in t0], [c / lc for c in r0]


def qinvmod(a, r):
    s, _, g = qgcdex(a, r)
    if len(g) != 1:
        raise ZeroDivisionError("not invertible modulo r")
    return qdivmod(s, r)[1]


def to_residues(a, m):
    """Map a list of p-integral rationals to residues modulo ``m``."""
    out = []
    for c in a:
        c = Fraction(c)
        out.append(c.numerator * pow(c.denominator, -1, m) % m)
    return out


class QPoly:
    """Element of Q[x] with ring operators, for division-free linear algebra."""

    __slots__ = ("c",)

    def __init__(self, c=()):
        self.c = qtrim(list(c))

    def __add__(self, o):
        o = _qp(o)
        return type(self)._make(self, add(self.c, o.c))

    __radd__ = __add__

    def __sub__(self, o):
        o = _qp(o)
        return type(self)._make(self, sub(self.c, o.c))

    def __rsub__(self, o):
        return _qp(o) - self

    def __neg__(self):
        return type(self)._make(self, [-x for x in self.c])

    def __mul__(self, o):
        o = _qp(o)
        return type(self)._make(self, qmul(self.c, o.c))

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.c)

    def __eq__(self, o):
        return isinstance(o, QPoly) and self.c == o.c or (not isinstance(o, QPoly) and self.c == _qp(o).c)

    def __hash__(self):
        return hash(tuple(self.c))

    def __repr__(self):
        return f"QPoly({[str(x) for x in self.c]})"

    @property
    def degree(self):
        return len(self.c) - 1

    def _make(self, c):
        return QPoly(c)

    def diff(self):
        return QPoly(derivative(self.c))

    def __call__(self, x):
        return evaluate(self.c, x)


def _qp(o):
    if isinstance(o, QPoly):
        return o
    return QPoly([Fraction(o)])


class QuotientElt(QPoly):
    """Element of Q[x]/(r) for a fixed nonconstant ``r``."""

    __slots__ = ("r",)

    def __init__(self, c, r):
        self.r = r
        super().__init__(qdivmod(c, r)[1] if len(qtrim(list(c))) >= len(r) else c)

    def _make(self, c):
        return QuotientElt(c, self.r)

    def __mul__(self, o):
        o = _qp(o)
        return QuotientElt(qmul(self.c, o.c), self.r)

    __rmul__ = __mul__

    def __add__(self, o):
        return QuotientElt(add(self.c, _qp(o).c), self.r)

    __radd__ = __add__

    def __sub__(self, o):
        return QuotientElt(sub(self.c, _qp(o).c), self.r)

    def __rsub__(self, o):
        return QuotientElt(sub(_qp(o).c, self.c), self.r)

    def __neg__(self):
        return QuotientElt([-x for x in self.c], self.r)
