"""Frobenius on H^1 of the fibre ``y^2 = Q(x, 0)`` and numerators of normalised singular fibres.

Working values are integer residues modulo ``p^M`` that stand for ``p^S * value``.
Divisions by ``p`` go through ``exact_div``; a failure means ``S`` was too small
and the computation is retried with more headroom.
"""

from dataclasses import dataclass
from math import comb

from . import ffield
from .errors import GenusTooLarge, InsufficientPrecision, NotSquarefree
from .padic import PadicApprox, PadicMatrix, exact_div, vp
from .polyarith import RadixBase, mul, qgcdex, shift, to_residues, trim


@dataclass
class FiberFrobenius:
    """``F0[i][j]`` is the coefficient of ``x^i dx/y`` in the image of ``x^j dx/y``.

    ``scaled`` holds integers with ``F0 = scaled / p^shift`` modulo ``p^N1``.
    """

    p: int
    N1: int
    scaled: list
    shift: int
    loss: int
    terms: int

    @property
    def g(self):
        return len(self.scaled) // 2

    @property
    def F0(self):
        p, N, s = self.p, self.N1, self.shift
        rows = [[_approx(x, p, s, N) for x in row] for row in self.scaled]
        return PadicMatrix(rows, p)

    @property
    def ord(self):
        """Minimum valuation of the entries (``N1`` if all vanish to precision)."""
        vals = [vp(x, self.p) for row in self.scaled for x in row if x]
        return min(vals) - self.shift if vals else self.N1

    def residues(self, N):
        """``F0 * p^shift`` as residues mod ``p^(N + shift)``, for ``N <= N1``."""
        mod = self.p ** (N + self.shift)
        return [[x % mod for x in row] for row in self.scaled]


def _approx(x, p, s, N):
    mod = p ** (N + s)
    x %= mod
    if x == 0:
        return PadicApprox.zero(p, N)
    v = vp(x, p)
    u = x // p ** v
    return PadicApprox(p, N, v - s, u % p ** (N + s - v))


def _floor_log(x, p):
    k = 0
    while x >= p:
        x //= p
        k += 1
    return k


def series_terms(p, N1):
    """Number of terms of the binomial series needed for absolute precision ``N1``."""
    ell = 0
    while True:
        ok = all((l + 1) - _floor_log(p * (2 * l + 1), p) >= N1 for l in range(ell, ell + 4 * p + 8))
        if ok:
            return ell
        ell += 1


def kedlaya_fiber(Q0, p, N1, headroom=None):
    """Matrix of the ``p``-power Frobenius on the odd part of H^1 of ``y^2 = Q0(x)``.

    ``Q0`` is an integer coefficient list, monic of odd degree ``2g+1``.
    """
    Q0 = trim([int(c) for c in Q0])
    n = len(Q0) - 1
    if n < 3 or n % 2 == 0 or Q0[-1] != 1:
        raise ValueError("fibre must be monic of odd degree at least 3")
    if not ffield_squarefree(Q0, p):
        raise NotSquarefree("fiber not squarefree mod p", p=p)
    L = max(1, series_terms(p, N1))
    n = len(Q0) - 1
    kmax = (p * (2 * L - 1) - 1) // 2
    top_degree = p * (n - 1) - 1 + n * p * (L - 1) - n * kmax + n
    loss = sum(vp(2 * k - 1, p) for k in range(1, kmax + 1))
    loss += sum(vp(2 * m - n + 2, p) for m in range(n - 1, top_degree + 1))
    S = _floor_log(p * (2 * L + 1), p) + 1 if headroom is None else headroom
    while True:
        try:
            scaled = _kedlaya_scaled(Q0, p, N1, L, S, loss)
            return FiberFrobenius(p=p, N1=N1, scaled=scaled, shift=S, loss=loss, terms=L)
        except InsufficientPrecision:
            S += 2


def ffield_squarefree(Q0, p):
    try:
        ffield.factor_squarefree_mod_p([c % p for c in Q0], p)
        return True
    except NotSquarefree:
        return False


def _kedlaya_scaled(Q0, p, N1, L, S, loss):
    n = len(Q0) - 1
    g = (n - 1) // 2
    M = N1 + S + loss + 1
    mod = p ** M
    Q = [c % mod for c in Q0]
    dQ = [i * Q0[i] % mod for i in range(1, n + 1)]
    # Q0(x^p) - Q0(x)^p, divisible by p
    Qp = [0] * (n * p + 1)
    for i, c in enumerate(Q0):
        Qp[i * p] = c
    pw = [1]
    for _ in range(p):
        pw = mul(pw, Q, mod)
    E = [(a - b) % mod for a, b in zip(Qp + [0] * len(pw), pw + [0] * len(Qp))]
    E = trim(E)
    # sum_l binom(-1/2, l) E^l Q^(p(L-1-l)) over the common pole y^(p(2L-1))
    Qpp = [1]
    for _ in range(p):
        Qpp = mul(Qpp, Q, mod)
    inv4 = pow(4, -1, mod)
    total = []
    Epow = [1]
    top = L - 1
    for ell in range(L):
        c = (-1) ** ell * comb(2 * ell, ell) * pow(inv4, ell, mod) % mod
        if total:
            total = mul(total, Qpp, mod)
        total = _addmul(total, Epow, c, mod)
        if ell < top:
            Epow = mul(Epow, E, mod)
    # total = sum_l c_l E^l Q^(p(top - l)); pole order p(2 top + 1)
    kmax = (p * (2 * top + 1) - 1) // 2
    scale = p ** (S + 1)
    s, t, _ = qgcdex(Q0, [i * Q0[i] for i in range(1, n + 1)])
    s = to_residues(s, mod)
    t = to_residues(t, mod)
    base = RadixBase(Q, mod)
    cols = []
    for j in range(2 * g):
        num = shift([x * scale % mod for x in total], p * (j + 1) - 1)
        count = (len(num) - 1) // n + 1
        digits = base.to_digits(num, count)
        # digit t sits over y^(2(kmax - t) + 1)
        acc = [0] * n
        for level in range(kmax, 0, -1):
            tdig = kmax - level
            if tdig < len(digits):
                acc = [(a + b) % mod for a, b in zip(acc, digits[tdig])]
            acc = _pole_step(acc, level, Q, dQ, t, n, p, mod)
        # remaining digits are polynomial multiples of y, i.e. A(x) dx / y with deg A >= n
        rest = [acc] + [list(dg) for dg in digits[kmax:]]
        if len(rest) > 1:
            rest[1] = [(a + b) % mod for a, b in zip(rest[0], rest[1])]
            rest = rest[1:]
        cols.append(_degree_reduce(trim(base.from_digits(rest)), Q0, g, p, mod))
    return [[cols[j][i] for j in range(2 * g)] for i in range(2 * g)]


def _addmul(a, b, c, mod):
    out = list(a) + [0] * max(0, len(b) - len(a))
    for i, x in enumerate(b):
        out[i] = (out[i] + c * x) % mod
    return out


def _pole_step(A, k, Q, dQ, t, n, p, mod):
    """``A dx / y^(2k+1)`` is cohomologous to ``(U + 2V'/(2k-1)) dx / y^(2k-1)``."""
    V = _rem(mul(t, A, mod), Q, mod)
    VdQ = mul(V, dQ, mod)
    diff = [(a - b) % mod for a, b in zip(A + [0] * len(VdQ), VdQ + [0] * len(A))]
    U, r = _divmod(diff, Q, mod)
    assert not any(r)
    dV = [(i * V[i]) % mod for i in range(1, len(V))]
    den = 2 * k - 1
    v = vp(den, p)
    unit = pow(den // p ** v, -1, mod)
    out = [0] * n
    for i, x in enumerate(U):
        out[i] = x % mod
    for i, x in enumerate(dV):
        y = 2 * x * unit % mod
        if v:
            y = exact_div(y, p ** v)
        out[i] = (out[i] + y) % mod
    return out


def _rem(a, b, mod):
    return _divmod(a, b, mod)[1]


def _divmod(a, b, mod):
    from .polyarith import divmod_monic
    q, r = divmod_monic(a, b, mod)
    r = list(r) + [0] * (len(b) - 1 - len(r))
    return q, r


def _degree_reduce(A, Q0, g, p, mod):
    """Reduce ``A dx / y`` onto ``x^i dx / y`` with ``i < 2g``."""
    A = list(A) + [0] * max(0, 2 * g + 1 - len(A))
    n = 2 * g + 1
    for m in range(len(A) - 1, 2 * g - 1, -1):
        c = A[m]
        if not c:
            continue
        # d(x^(m-2g) y) = [(m-2g) x^(m-2g-1) Q + x^(m-2g) Q'/2] dx / y, leading (2m-2g+1)/2
        k = m - 2 * g
        rel = [0] * (m + 1)
        for i, qc in enumerate(Q0):
            if k:
                rel[i + k - 1] += k * qc * 2
        for i in range(1, n + 1):
            rel[i - 1 + k] += i * Q0[i]
        lead = rel[m]
        lv = vp(lead, p)
        inv = pow(lead // p ** lv, -1, mod)
        f = c * inv % mod
        if lv:
            f = exact_div(f, p ** lv)
        for i in range(m):
            A[i] = (A[i] - f * rel[i]) % mod
        A[m] = 0
    return A[:2 * g]


def reduced_fiber_numerator(H, g, K=None):
    """Numerator of the zeta function of ``Z^2 = H(X)`` over the field of ``H``'s coefficients.

    ``H`` is a list of ``FqElement`` of degree ``2g - 1``.
    """
    if g == 1:
        return [1]
    if g != 2:
        raise GenusTooLarge("genus too large for counting fallback", g=g)
    F = K if K is not None else H[0].F
    if F.q > 10 ** 7:
        raise GenusTooLarge("genus too large for counting fallback: field too big", q=F.q)
    count = 1
    for x in F.elements():
        v = ffield.poly_eval(H, x)
        count += 1 if v.is_zero() else (2 if ffield.is_square(v) else 0)
    a = F.q + 1 - count
    return [1, -a, F.q]
