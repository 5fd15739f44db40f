"""Effective constants and the precision parameters of a run.

Integer logarithms ``floor(log_p x)`` are exact; the real logarithms in the
growth-constant chain are evaluated with mpmath at 50 digits and rounded up.
"""

from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import comb

import mpmath

from .errors import RerunRequired
from .padic import vp
from .pencil import betti_degree  # noqa: F401  (re-exported)

mpmath.mp.dps = 50


def flog(x, p):
    """``floor(log_p x)`` for a positive integer ``x``."""
    if x < 1:
        raise ValueError("log of a non-positive integer")
    k = 0
    t = p
    while t <= x:
        t *= p
        k += 1
    return k


def clog(x, p):
    """``ceil(log_p x)`` for a positive rational ``x``."""
    x = Fraction(x)
    k = 0
    t = Fraction(1)
    while t < x:
        t *= p
        k += 1
    return k


def _rlog(x, p):
    return mpmath.log(mpmath.mpf(x)) / mpmath.log(p)


def bmp(m, p):
    """Christol-Dwork constant ``B_{m,p}``."""
    fact = 1
    for i in range(2, m):
        fact *= i
    prod = 1
    for j in range(1, m + 1):
        prod *= comb(m, j)
    return m - 1 + vp(fact, p) + min(m - 1, vp(prod, p))


@dataclass
class GrowthConstants:
    alpha2: object
    beta2: object
    beta3: object
    alpha1: object
    beta1: object
    alpha: int
    beta: int


def growth_constants(m, p, Delta_bound, N_den, nilpotent=False):
    """``(alpha, beta)`` with ``ord_p(w) >= -(alpha log_p(l - rho) + beta)``."""
    B = bmp(m, p)
    D, Nd = Delta_bound, N_den
    if nilpotent:
        a2, b2 = mpmath.mpf(B), mpmath.mpf(0)
    elif p > max(m, 2 * Nd):
        a2, b2 = mpmath.mpf(m * m - 1), mpmath.mpf(2 * m * m - m - 1)
    else:
        lg = 1 + _rlog(2 * Nd, p)
        a2 = m * (m - 1) * lg + 3 * m - 3
        b2 = 2 * m * (m - 1) * lg + 3 * m - 3
    b3 = m * m * (mpmath.mpf(D) / (p - 1) + 4 * _rlog(D + 1, p) + 2 * _rlog(2 * Nd, p))
    a1 = a2
    b1 = a2 * _rlog(2 * D + 1, p) + b2 + b3
    alpha = int(mpmath.ceil(2 * a1 + m))
    beta = int(mpmath.ceil(2 * b1 + m * (_rlog(Nd, p) + _rlog(2 * D + 2, p))))
    return GrowthConstants(a2, b2, b3, a1, b1, alpha, beta)


def _eff_floor(ell, p):
    return (ell + 1) - flog(p * (2 * ell + 1), p)


@dataclass
class DecayFloor:
    """Certified lower bound on ``ord_p f_k`` for the r-adic coefficients of ``F(Gamma)``."""

    p: int
    adj_ratio: Fraction
    r_ratio: Fraction

    @property
    def finite_at_infinity(self):
        return self.adj_ratio + self.r_ratio <= 1

    def ell_infinity(self, k):
        p, a, r = self.p, self.adj_ratio, self.r_ratio
        num = 2 * k - (p - 1) * (a - 1)
        if self.finite_at_infinity:
            return 0 if num <= 0 else None
        return max(0, (num / (2 * p * (a + r - 1))).__floor__())

    def __call__(self, k):
        p = self.p
        if k < 0:
            ell = max(0, (2 * -k - p + 1) // (2 * p))
            return _eff_floor(ell, p)
        ell = self.ell_infinity(k)
        if ell is None:
            return float("inf")
        return _eff_floor(ell, p)


def decay_floor(conn, p, R_degree):
    d = conn.d
    res_deg = len(conn.res) - 1
    adj_ratio = Fraction(conn.AdjM_degree, res_deg)
    r_ratio = Fraction(R_degree, p * res_deg)
    del d
    return DecayFloor(p, adj_ratio, r_ratio)


def R_degree(Q, p):
    """``deg_Gamma`` of ``(Q^p - Q(X^p, Gamma^p)) / p`` for ``Q`` a dict ``(a, b) -> c``."""
    # only the Gamma-degree matters, so track the maximal Gamma-degree per X-degree
    terms = {k: v for k, v in Q.items() if v}
    acc = {(0, 0): 1}
    for _ in range(p):
        nxt = {}
        for (a1, b1), c1 in acc.items():
            for (a2, b2), c2 in terms.items():
                key = (a1 + a2, b1 + b2)
                nxt[key] = nxt.get(key, 0) + c1 * c2
        acc = {k: v for k, v in nxt.items() if v}
    for (a, b), c in terms.items():
        key = (a * p, b * p)
        acc[key] = acc.get(key, 0) - c
    return max((b for (a, b), c in acc.items() if c), default=0)


def final_precision(d, g, p):
    """``N = ceil(log_p(2 q^e binom(D, e)))`` with ``D = d - 2g``, ``e = floor(D / 2)``."""
    D = d - 2 * g
    e = D // 2
    return clog(2 * p ** e * comb(D, e), p)


@dataclass
class PrecisionPlan:
    p: int
    g: int
    h: int
    d: int
    N: int
    N3: int
    x_fin: int
    N2_fin: int
    NG_fin: int
    x_inf: int
    N2_inf: int
    NG_inf: int
    N2: int
    NG: int
    N1: int
    B: int
    alpha_prime: int
    alpha_fin: int
    beta_fin: int
    alpha_inf: int
    beta_inf: int
    adj_ratio: Fraction
    r_ratio: Fraction
    conjecture_mode: bool
    ord_F0: int = 0
    flags: list = field(default_factory=list)

    @property
    def D(self):
        return self.d - 2 * self.g

    @property
    def e(self):
        return self.D // 2

    def bracket(self):
        return (f"[{self.N},{self.N3},{self.N2_fin},{self.N2_inf},{self.N1};"
                f"{self.NG_fin},{self.NG_inf}]")

    def as_dict(self):
        out = asdict(self)
        out["adj_ratio"] = str(self.adj_ratio)
        out["r_ratio"] = str(self.r_ratio)
        out["bracket"] = self.bracket()
        return out


def x_fin_for(N3, p, B, g):
    """Least ``x`` with ``floor(x/p) - floor(log_p(2x+1)) - (2B + 2g) floor(log_p x) >= N3``."""
    c = 2 * B + 2 * g
    x = 1
    while x // p - flog(2 * x + 1, p) - c * flog(x, p) < N3:
        x += 1
    return x


def plan(g, h, d, p, conjecture_mode=True, ord_F0=0, N3=None, adj_degree=None, res_degree=None,
         R_deg=None, Delta_bound=0, N_den=1, NG_inf_conjecture=100):
    """Precision parameters ``[N, N3, N2_fin, N2_inf, N1; NG_fin, NG_inf]`` and constants."""
    m = 2 * g
    N = final_precision(d, g, p)
    if N3 is None:
        N3 = N
    if N3 < N:
        raise ValueError("N3 must be at least N")
    B = bmp(m, p)
    fin = growth_constants(m, p, 0, 1, nilpotent=True)
    inf = growth_constants(m, p, Delta_bound, N_den)
    x_fin = x_fin_for(N3, p, B, g)
    N2_fin = x_fin // p - flog(2 * x_fin + 1, p)
    NG_fin = d * x_fin
    res_degree = d if res_degree is None else res_degree
    adj_degree = 0 if adj_degree is None else adj_degree
    R_deg = p * h - 1 if R_deg is None else R_deg
    adj_ratio = Fraction(adj_degree, res_degree)
    r_ratio = Fraction(R_deg, p * res_degree)
    flags = []
    if conjecture_mode:
        x_inf = -(-NG_inf_conjecture // d)
        N2_inf = N2_fin
        NG_inf = NG_inf_conjecture
    else:
        floor_fn = DecayFloor(p, adj_ratio, r_ratio)
        if floor_fn.finite_at_infinity:
            flags.append("infinity side certified finite: adj_ratio + r_ratio <= 1")
            x_inf = max(1, int(((p - 1) * (adj_ratio - 1) / 2).__floor__()) + 1)
            N2_inf = N3 + inf.alpha * flog(max(1, x_inf * d), p) + inf.beta
        else:
            x = 1
            while True:
                dec = floor_fn(x)
                if dec - (inf.alpha * flog(x * d, p) + inf.beta) >= N3:
                    break
                x += 1
            x_inf, N2_inf = x, dec
        NG_inf = d * x_inf
    N2 = max(N2_fin, N2_inf)
    NG = NG_fin + NG_inf
    N1 = N2 + (3 * B + 1) * flog(NG, p) - B - min(ord_F0, 0)
    if ord_F0 < 0:
        flags.append("ord_p F(0) < 0: N1 includes -ord_p F(0); bound not certified by the source")
    return PrecisionPlan(p=p, g=g, h=h, d=d, N=N, N3=N3, x_fin=x_fin, N2_fin=N2_fin, NG_fin=NG_fin,
                         x_inf=x_inf, N2_inf=N2_inf, NG_inf=NG_inf, N2=N2, NG=NG, N1=N1, B=B,
                         alpha_prime=2 * B + 1, alpha_fin=fin.alpha, beta_fin=fin.beta,
                         alpha_inf=inf.alpha, beta_inf=inf.beta, adj_ratio=adj_ratio,
                         r_ratio=r_ratio, conjecture_mode=conjecture_mode, ord_F0=ord_F0,
                         flags=flags)


def check_rerun(plan_, ord_F):
    """Raise ``RerunRequired`` when the computed Frobenius on H^2 has negative valuation."""
    if ord_F < 0:
        D = plan_.D
        loss = -ord_F * max(1, D)
        raise RerunRequired("rerun with larger N3: Frobenius on H^2 has negative valuation",
                            suggested_N3=plan_.N3 + loss, ord_F=ord_F)
