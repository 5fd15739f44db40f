"""From the Frobenius matrix on H^2 to the zeta function of the compactified surface.

``det(1 - T F)`` factors as ``w2(T) * prod_i Phi_i*(T)`` where ``Phi_i`` is the
contribution of the singular fibre over the i-th closed point and ``f*`` denotes the
reciprocal ``(q^2 T)^k f(1 / (q^2 T)) / lc(f)``; ``w2`` is fixed by that reciprocal.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import mpmath
import numpy as np
import sympy

from . import ffield
from .errors import (InconsistentZeta, InsufficientPrecision, LiftOutOfBounds, RerunRequired,
                     VerificationFailed, WeilDisambiguationFailed)
from .kedlaya import reduced_fiber_numerator
from .padic import (PadicApprox, PadicPoly, berkowitz_mod, charpoly_division_free, symmetric_lift,
                    vp)
from .pencil import singular_fiber_data
from .polyarith import to_residues

# integer polynomial helpers (lowest degree first) ---------------------------------


def ptrim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def pmul(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return ptrim(out)


def pprod(ps):
    out = [1]
    for q in ps:
        out = pmul(out, q)
    return out


def series_div(a, b, n, mod=None):
    """First ``n`` coefficients of ``a / b`` with ``b[0] = 1``."""
    if b[0] != 1:
        raise ValueError("series divisor must have constant term 1")
    out = []
    for k in range(n):
        c = a[k] if k < len(a) else 0
        c -= sum(b[j] * out[k - j] for j in range(1, min(k, len(b) - 1) + 1))
        out.append(c % mod if mod else c)
    return out


def substitute_power(f, k):
    """``f(T^k)``."""
    out = [0] * ((len(f) - 1) * k + 1) if f else []
    for i, c in enumerate(f):
        out[i * k] = c
    return out


def q2_reciprocal(f, q):
    """``(q^2 T)^deg f * f(1 / (q^2 T)) / lc(f)``."""
    f = ptrim(f)
    n = len(f) - 1
    lc = f[-1]
    out = []
    for i in range(n + 1):
        x = Fraction(f[n - i] * q ** (2 * i), lc)
        out.append(x)
    if any(x.denominator != 1 for x in out):
        raise ValueError("reciprocal not integral")
    return [int(x) for x in out]


# characteristic polynomial ------------------------------------------------------


@dataclass
class CharpolyData:
    """``det(1 - T F)`` as residues; coefficient ``k`` is known modulo ``p^prec[k]``."""

    p: int
    coeffs: list
    prec: list


def det_one_minus_TF(H):
    """``det(1 - T F)`` for a scaled Frobenius matrix ``H`` (``H2Frobenius``)."""
    p, N, s = H.p, H.N, H.shift
    n = H.dim
    mod = p ** (N + s * n)
    c = berkowitz_mod(H.scaled, mod)
    coeffs, prec = [], []
    for k, x in enumerate(c):
        # det(1 - TF) = sum_k c_k T^k, c_k of the scaled matrix divided by p^(k s)
        if k == 0:
            coeffs.append(1)
            prec.append(N)
            continue
        pk = N - (k - 1) * s
        if pk <= 0:
            coeffs.append(0)
            prec.append(0)
            continue
        xx = x % p ** (N + s)
        if s and xx % p ** (k * s):
            # the scaled coefficient is not divisible by p^(ks) to precision: negative valuation
            v = vp(xx, p)
            coeffs.append(None)
            prec.append(v - k * s)
            continue
        coeffs.append((xx // p ** (k * s)) % p ** pk)
        prec.append(pk)
    return CharpolyData(p=p, coeffs=coeffs, prec=prec)


def p2_open(Fmatrix, q):
    """``P_2(X, T) = det(1 - T q^2 F^-1) = C(q^2 T) / C(0)`` with ``C = det(T - F)``."""
    C = charpoly_division_free(Fmatrix)
    p = Fmatrix.p
    c = list(C.coeffs) if isinstance(C, PadicPoly) else list(C)
    c0 = c[0]
    zero = c0.is_zero if isinstance(c0, PadicApprox) else c0 == 0
    if zero:
        raise InsufficientPrecision("Frobenius matrix singular at available precision")
    out = []
    for k, x in enumerate(c):
        if isinstance(x, PadicApprox):
            out.append(x * PadicApprox.from_rational(q ** (2 * k), p) / c0)
        else:
            out.append(Fraction(x) * q ** (2 * k) / c0)
    return PadicPoly(out, p) if isinstance(c0, PadicApprox) else out


# fibre data ----------------------------------------------------------------------


@dataclass
class FiberFactor:
    degree: int
    delta: int
    P: list
    factor: list

    @property
    def Phi(self):
        """``P(T^d) (1 + delta T^d)``."""
        return pmul(substitute_power(self.P, self.degree), substitute_power([1, self.delta], self.degree))

    def as_dict(self):
        return {"degree": self.degree, "delta": self.delta, "P": self.P, "factor": self.factor}


def fiber_factors(surface, conn):
    """Singular fibre data over the closed points of ``r mod p``."""
    p = surface.p
    rbar = [int(c.numerator * pow(c.denominator, -1, p)) % p for c in conn.r]
    facs = ffield.factor_squarefree_mod_p(rbar, p)
    out = []
    for fac in facs:
        data = singular_fiber_data(surface, fac)
        P = reduced_fiber_numerator(data["H"], conn.g)
        out.append(FiberFactor(degree=data["degree"], delta=data["delta"], P=list(P),
                               factor=list(fac)))
    return out


def zeta_open(P2, degrees, q):
    """``Z(X, T) = prod_i (1 - (qT)^d_i) / (P_2(X, T) (1 - q^2 T))`` as ``(num, den)``."""
    num = pprod(_one_minus_qT_pow(q, d) for d in degrees)
    den = pmul(list(P2), [1, -q * q])
    return num, den


def _one_minus_qT_pow(q, d):
    out = [0] * (d + 1)
    out[0] = 1
    out[d] = -q ** d
    return out


def zeta_curves_C(fibers, q):
    """Zeta function of the fibre at infinity plus the singular fibres as ``(num, den)``."""
    num = pprod(f.Phi for f in fibers)
    den = pprod([[1, -1], [1, -q]] + [_one_minus_qT_pow(q, f.degree) for f in fibers])
    return num, den


# Weil completion ------------------------------------------------------------------


def weil_bounds(D, q):
    return [comb(D, i) * q ** i for i in range(D + 1)]


def is_weight_two(w, q, tol=1e-9):
    """All complex roots of ``w`` (lowest first, ``w(0) != 0``) lie on ``|z| = 1/q``."""
    w = ptrim(w)
    if len(w) <= 1:
        return True
    T = sympy.symbols("T")
    P = sympy.Poly(list(reversed(w)), T)
    sqf = sympy.Poly(sympy.quo(P, sympy.gcd(P, P.diff(T))), T)
    c = [int(x) for x in reversed(sqf.all_coeffs())]
    # scale z = u / q so that the target circle is |u| = 1
    scaled = [Fraction(x, q ** i) for i, x in enumerate(c)]
    big = max(abs(x) for x in scaled)
    coeffs = [float(x / big) for x in reversed(scaled)]
    roots = np.roots(coeffs)
    for z in roots:
        err = abs(abs(z) - 1)
        if err <= tol:
            continue
        if err > 1e-4:
            return False
        # near miss: recompute at high precision
        return _is_weight_two_mp(scaled, tol)
    return True


def _is_weight_two_mp(scaled, tol):
    with mpmath.workdps(60):
        coeffs = [mpmath.mpf(x.numerator) / x.denominator for x in reversed(scaled)]
        roots = mpmath.polyroots(coeffs, maxsteps=400, extraprec=200)
        return all(abs(abs(z) - 1) <= tol for z in roots)


def complete_candidates(prefix, D, q):
    """Both completions ``a_(D-i) = eps q^(D-2i) a_i`` of ``a_0..a_e``; ``None`` if inconsistent."""
    e = D // 2
    out = {}
    for eps in (1, -1):
        a = [0] * (D + 1)
        ok = True
        for i in range(e + 1):
            a[i] = prefix[i]
        for i in range(e + 1):
            j = D - i
            val = eps * q ** (D - 2 * i) * a[i]
            if j <= e:
                if a[j] != val:
                    ok = False
            else:
                a[j] = val
        out[eps] = a if ok else None
    return out


def complete_weil(w2_prefix, D, q, consistent=None):
    """Return ``(w2, eps, how)`` from the known coefficients ``a_0..a_e``.

    ``consistent`` optionally rejects candidates that contradict further p-adic data;
    it is consulted only when the weight test leaves more than one candidate.
    """
    if D == 0:
        return [1], 1, "trivial"
    cands = complete_candidates(w2_prefix, D, q)
    good = [(eps, a) for eps, a in cands.items() if a is not None and is_weight_two(a, q)]
    how = "weight"
    if len(good) > 1 and consistent is not None:
        good = [(eps, a) for eps, a in good if consistent(a)]
        how = "weight+padic"
    if len(good) != 1:
        raise WeilDisambiguationFailed("Weil disambiguation failed", survivors=[e for e, _ in good])
    eps, a = good[0]
    return a, eps, how


def separating_precision(prefix, D, q):
    """Least absolute precision on ``a_(e+1)..a_D`` that tells the two sign completions apart.

    They differ by ``2 q^(D-2i) a_i`` in coefficient ``D - i``.
    """
    e = D // 2
    best = None
    for i, a in enumerate(prefix):
        if a and D - i > e:
            need = D - 2 * i + vp(a, q) + vp(2, q) + 1
            best = need if best is None else min(best, need)
    return best


def extract_w2_prefix(cp, fibers, q, D, N3):
    """Symmetric lifts of ``a_0..a_e`` of ``w2 = det(1 - TF) / prod Phi_i*``."""
    p = cp.p
    e = D // 2
    phis = pprod(q2_reciprocal(f.Phi, q) for f in fibers)
    n = e + 1
    bounds = weil_bounds(D, q)
    out = []
    for k in range(n):
        if cp.coeffs[k] is None:
            raise RerunRequired("rerun with larger N3: negative valuation in det(1 - TF)",
                                suggested_N3=N3 - cp.prec[k] + N3)
    prec = min(cp.prec[:n])
    mod = p ** prec
    w = series_div([c % mod for c in cp.coeffs[:n]], phis, n, mod)
    for k in range(n):
        pk = min(cp.prec[:k + 1])
        a = PadicApprox(p, pk, 0, w[k] % p ** pk) if w[k] % p ** pk else PadicApprox.zero(p, pk)
        try:
            out.append(symmetric_lift(a, bounds[k]))
        except LiftOutOfBounds as exc:
            if p ** pk <= 2 * bounds[k]:
                need = 0
                while p ** need <= 2 * bounds[k]:
                    need += 1
                raise RerunRequired("rerun with larger N3: coefficient precision below the Weil bound",
                                    suggested_N3=N3 + need - pk, index=k) from exc
            raise
    return out


def consistency_check(cp, w2, fibers, q):
    """Compare ``w2 * prod Phi_i*`` against every known coefficient of ``det(1 - TF)``."""
    p = cp.p
    full = pmul(w2, pprod(q2_reciprocal(f.Phi, q) for f in fibers))
    bad = []
    for k, (c, pk) in enumerate(zip(cp.coeffs, cp.prec)):
        if c is None or pk <= 0:
            continue
        x = full[k] if k < len(full) else 0
        if (x - c) % p ** pk:
            bad.append(k)
    return bad


@dataclass
class ZetaFactorization:
    q: int
    P2_open: list
    fibers: list
    Z_C: tuple
    w2: list
    eps: int
    P2_compact: list
    checked_coeffs: int = 0
    notes: list = field(default_factory=list)

    @property
    def Z_compact(self):
        """``1 / ((1 - T) P2_compact (1 - q^2 T))`` as ``(num, den)``."""
        return [1], pprod([[1, -1], self.P2_compact, [1, -self.q * self.q]])

    def as_dict(self):
        num, den = self.Z_compact
        return {
            "q": self.q,
            "P2_open": self.P2_open,
            "fibers": [f.as_dict() for f in self.fibers],
            "Z_C": {"num": self.Z_C[0], "den": self.Z_C[1]},
            "w2": self.w2,
            "eps": self.eps,
            "P2_compact": self.P2_compact,
            "P2_compact_factored": factored_display(self.P2_compact, self.q),
            "Z_compact": {"num": num, "den": den},
            "checked_coeffs": self.checked_coeffs,
            "notes": self.notes,
        }


def assemble(H, surface, conn, plan_):
    """Full factorisation from the H^2 Frobenius matrix ``H``."""
    q = surface.p
    g = conn.g
    D = conn.d - 2 * g
    cp = det_one_minus_TF(H)
    fibers = fiber_factors(surface, conn)
    prefix = extract_w2_prefix(cp, fibers, q, D, plan_.N3)
    try:
        w2, eps, how = complete_weil(prefix, D, q,
                                     consistent=lambda w: not consistency_check(cp, w, fibers, q))
    except WeilDisambiguationFailed as exc:
        need = separating_precision(prefix, D, q)
        have = H.N - max(0, D - 1) * H.shift
        if len(exc.context.get("survivors", [])) == 2 and need is not None and need > have:
            raise RerunRequired("rerun with larger N3: both signs pass the weight test and the "
                                "known p-adic coefficients do not separate them",
                                suggested_N3=need + max(0, D - 1) * H.shift) from exc
        raise
    bad = consistency_check(cp, w2, fibers, q)
    if bad:
        raise InconsistentZeta("inconsistent zeta: det(1 - TF) disagrees with the completed factorization",
                               coefficients=bad)
    P2 = pmul(w2, pprod(f.Phi for f in fibers))
    Z_C = zeta_curves_C(fibers, q)
    P2c = pmul([1, -q], w2)
    checked = sum(1 for c, pk in zip(cp.coeffs, cp.prec) if c is not None and pk > 0)
    return ZetaFactorization(q=q, P2_open=P2, fibers=fibers, Z_C=Z_C, w2=w2, eps=eps,
                             P2_compact=P2c, checked_coeffs=checked,
                             notes=[f"sign fixed by: {how}"])


# verification -----------------------------------------------------------------------


@dataclass
class LefschetzReport:
    passed: bool
    s_max: int
    predicted: list
    observed: list
    first_mismatch: object = None

    def as_dict(self):
        return {"passed": self.passed, "s_max": self.s_max, "predicted": self.predicted,
                "observed": self.observed, "first_mismatch": self.first_mismatch}


def compact_counts(surface, s_max, workers=1):
    """``#Xbar(F_(p^s))``: affine points of ``Z^2 = Qbar`` plus the fibre at infinity."""
    p = surface.p
    Qbar = surface.Qbar()
    return [ffield.count_affine_surface(Qbar, p, s, workers) + p ** s + 1 for s in range(1, s_max + 1)]


def verify_lefschetz(Z_compact, surface, s_max, workers=1, observed=None):
    num, den = Z_compact
    predicted = ffield.counts_from_zeta(num, den, s_max)
    if observed is None:
        observed = compact_counts(surface, s_max, workers)
    first = next((s + 1 for s in range(s_max) if predicted[s] != observed[s]), None)
    return LefschetzReport(passed=first is None, s_max=s_max, predicted=predicted,
                           observed=observed, first_mismatch=first)


def require(report):
    if not report.passed:
        raise VerificationFailed("verification mismatch", s=report.first_mismatch,
                                 predicted=report.predicted, observed=report.observed)
    return report


# display --------------------------------------------------------------------------------


def _factored_int(n):
    if n == 0:
        return "0"
    sign = "-" if n < 0 else ""
    n = abs(n)
    if n == 1:
        return sign + "1"
    parts = "".join(f"{pr}^{{{e}}}" for pr, e in sorted(sympy.factorint(n).items()))
    return sign + parts


def factored_display(poly, q):
    """``1+2^{3}T^{1}+...`` with every coefficient in prime-power notation."""
    out = []
    for i, c in enumerate(poly):
        if c == 0:
            continue
        term = _factored_int(c)
        if i:
            if abs(c) == 1:
                term = term[:-1]
            term += f"T^{{{i}}}"
        if out and not term.startswith("-"):
            term = "+" + term
        out.append(term)
    return "".join(out) if out else "0"


def factor_over_Z(poly):
    """Irreducible factors of an integer polynomial as ``[(factor, multiplicity)]``."""
    T = sympy.symbols("T")
    P = sympy.Poly(list(reversed(poly)), T)
    _, facs = sympy.factor_list(P)
    out = []
    for f, e in facs:
        c = [int(x) for x in reversed(f.all_coeffs())]
        if c and c[0] < 0:
            c = [-x for x in c]
        out.append((c, e))
    out.sort(key=lambda t: (len(t[0]), t[0]))
    return out


def to_residue_poly(poly, mod):
    return to_residues([Fraction(c) for c in poly], mod)
