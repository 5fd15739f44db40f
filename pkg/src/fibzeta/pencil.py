"""The pencil of hyperelliptic curves ``Z^2 = Q(X, Gamma)`` and its Gauss-Manin connection.

Basis of relative H^1: ``e_i = X^i dX / Z`` for ``0 <= i < 2g``. Column ``j`` of
``B = b/r`` holds the coordinates of ``nabla_{d/dGamma} e_j``.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
import itertools

import sympy

from . import ffield
from .errors import (AssumptionViolation, FiberNotNodal, NonNilpotentMonodromy, NotSquarefree,
                     UnpreparedExponents, ZeroEigenvalueAtInfinity)
from .padic import adjugate, berkowitz
from .polyarith import QPoly, QuotientElt, qdivmod, qgcdex, qinvmod, qtrim

VIOLATIONS = (
    "PRIME_NOT_ADMISSIBLE",      # (a)
    "RESULTANT_DEGENERATE",      # (b)
    "POLES_NOT_SIMPLE",          # (c)
    "EXPONENTS_NOT_PREPARED",    # (d) exponents differ by an integer, or rho > 1
    "NONNILPOTENT_OR_IRRATIONAL",  # (d) finite monodromy, zero or irrational exponent at infinity
    "SHAPE_NOT_SIMPLEX",         # (e) monic in Gamma, odd h, constant term 1, support in simplex
    "COPRIME_DEGREES",           # (e) 2g+1, h, p pairwise coprime
    "NONDEGENERATE_FIBER0",      # (f) fibre over 0
    "NONDEGENERATE_AXIS",        # (f) Q(0, Gamma)
    "SINGULAR_SURFACE",          # (f) common zero of Q, Q_X, Q_Gamma
    "FIBER_NOT_NODAL",           # (g)
)

# Violations that only void the a priori precision guarantees; the algorithm itself
# still runs, and a relaxed run must be validated by point counts.
SOFT_VIOLATIONS = frozenset({"EXPONENTS_NOT_PREPARED", "COPRIME_DEGREES"})


@dataclass
class SurfaceInput:
    """``Q`` maps ``(a, b)`` to the integer coefficient of ``X^a Gamma^b``."""

    p: int
    Q: dict
    conjecture_finite_poles: bool = False
    verify_depth: int = 0

    def __post_init__(self):
        self.Q = {k: int(v) for k, v in self.Q.items() if v}
        self.delta_x = max(a for a, _ in self.Q)
        self.g = (self.delta_x - 1) // 2
        self.h = max(b for _, b in self.Q)

    def Qbar(self):
        return {k: v % self.p for k, v in self.Q.items() if v % self.p}

    def x_coeffs(self):
        """Q as a polynomial in X with QPoly coefficients in Gamma."""
        out = [[Fraction(0)] * (self.h + 1) for _ in range(self.delta_x + 1)]
        for (a, b), c in self.Q.items():
            out[a][b] += c
        return [QPoly(c) for c in out]

    def fiber(self, gamma=0):
        return [int(sum(c * gamma ** b for (a2, b), c in self.Q.items() if a2 == a))
                for a in range(self.delta_x + 1)]


@dataclass
class ConnectionData:
    b: list
    r: list
    res: list
    d: int
    AdjM_degree: int
    g: int
    exponents: dict = field(default_factory=dict)
    rho: int = 1
    Delta_bound: int = 0
    N_den: int = 1
    prepared: bool = True

    @property
    def m(self):
        return len(self.b)

    def b_coeff(self, k):
        """Matrix coefficient of Gamma^k in b."""
        m = self.m
        return [[self.b[i][j][k] if k < len(self.b[i][j]) else Fraction(0) for j in range(m)]
                for i in range(m)]

    @property
    def b_degree(self):
        return max((len(e) - 1 for row in self.b for e in row), default=-1)


def _coeff(poly_x, i):
    return poly_x[i] if 0 <= i < len(poly_x) else QPoly()


def _xshift(poly_x, k):
    return [QPoly()] * k + list(poly_x)


def _xdiff(poly_x):
    return [poly_x[i] * i for i in range(1, len(poly_x))]


def sylvester_and_resultant(Q):
    """Sylvester matrix of ``Q`` and ``dQ/dX`` with respect to ``X`` and its determinant."""
    if isinstance(Q, dict):
        Q = SurfaceInput(3, Q)
    qx = Q.x_coeffs()
    dx = _xdiff(qx)
    delta = Q.delta_x
    n = 2 * delta - 1
    M = []
    for i in range(1, n + 1):
        row_poly = _xshift(qx, delta - 1 - i) if i <= delta - 1 else _xshift(dx, 2 * delta - 1 - i)
        M.append([_coeff(row_poly, n - j) for j in range(1, n + 1)])
    c = berkowitz(M, QPoly([1]))
    res = c[-1] * (-1) ** n
    return M, res


def connection_matrix(Q, literal=False):
    """Connection data ``B = b/r`` in lowest terms, ``r`` monic.

    ``literal=True`` reproduces the column slice that drops the top coefficient of
    the ``dQ/dX`` multiplier; it is kept only so the discrepancy can be tested.
    """
    if isinstance(Q, dict):
        Q = SurfaceInput(3, Q)
    M, res = sylvester_and_resultant(Q)
    delta = Q.delta_x
    n = 2 * delta - 1
    adj = adjugate(M, QPoly([1]), QPoly())
    adj_deg = max(e.degree for row in adj for e in row)
    qg = [e.diff() for e in Q.x_coeffs()]
    m = delta - 1
    # rows of E * Adj(M) = res * F
    Fres = []
    for i in range(1, m + 1):
        poly = _xshift(qg, i - 1)
        Erow = [_coeff(poly, n - j) * Fraction(-1, 2) for j in range(1, n + 1)]
        Fres.append([sum((Erow[k] * adj[k][j] for k in range(n)), QPoly()) for j in range(n)])
    cols = []
    for i in range(m):
        row = Fres[i]
        alpha = [row[delta - j - 1] for j in range(1, delta)]          # coefficient of X^(j-1)
        top = delta if literal else delta + 1
        beta = [row[2 * delta - j - 1] for j in range(1, top)]
        mi = [alpha[k] + (2 * (k + 1)) * beta[k + 1] if k + 1 < len(beta) else alpha[k]
              for k in range(m)]
        cols.append(mi)
    Bnum = [[cols[j][i] for j in range(m)] for i in range(m)]
    common = res.c
    for row in Bnum:
        for e in row:
            if e:
                common = qgcdex(common, e.c)[2]
    r = qdivmod(res.c, common)[0]
    lc = r[-1]
    r = [c / lc for c in r]
    b = []
    for row in Bnum:
        brow = []
        for e in row:
            q, rem = qdivmod(e.c, common)
            assert not rem
            brow.append(qtrim([c / lc for c in q]))
        b.append(brow)
    return ConnectionData(b=b, r=r, res=res.c, d=len(r) - 1, AdjM_degree=adj_deg, g=(delta - 1) // 2)


def _rational_roots(coeffs):
    """Roots (with multiplicity) of a rational polynomial that splits over Q, else None."""
    T = sympy.Symbol("T")
    P = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(coeffs)], T,
                   domain="QQ")
    out = []
    for fac, e in P.factor_list()[1]:
        if fac.degree() != 1:
            return None
        a, b0 = fac.all_coeffs()
        root = Fraction(int((-b0 / a).p), int((-b0 / a).q))
        out.extend([root] * e)
    return sorted(out)


def local_exponent_data(conn, strict=True):
    """Fill exponent metadata on ``conn``; raise on violated monodromy conditions.

    With ``strict=False`` exponents differing by an integer are recorded in
    ``conn.prepared`` instead of raising.
    """
    m = conn.m
    r = conn.r
    # finite residues: b / r' modulo r must be nilpotent
    rp_inv = qinvmod([c * i for i, c in enumerate(r)][1:], r)
    Nmat = [[QuotientElt(qdivmod(_qmul(conn.b[i][j], rp_inv), r)[1], r) for j in range(m)]
            for i in range(m)]
    cp = berkowitz(Nmat, QuotientElt([1], r))
    if any(c for c in cp[1:]):
        raise NonNilpotentMonodromy("non-nilpotent finite monodromy")
    if conn.b_degree >= conn.d:
        raise UnpreparedExponents("unprepared exponents: pole at infinity is not simple")
    top = conn.b_coeff(conn.d - 1)
    negtop = [[-x for x in row] for row in top]
    cpi = berkowitz(negtop, Fraction(1))
    roots = _rational_roots(cpi[::-1])
    if roots is None:
        raise UnpreparedExponents("unprepared exponents: exponents at infinity are not rational")
    if any(x == 0 for x in roots):
        raise ZeroEigenvalueAtInfinity("zero eigenvalue at infinity", exponents=roots)
    conn.prepared = True
    for x, y in itertools.combinations(roots, 2):
        diff = x - y
        if diff and diff.denominator == 1:
            if strict:
                raise UnpreparedExponents("unprepared exponents: two exponents differ by an integer",
                                          exponents=roots)
            conn.prepared = False
    ints = [int(x) for x in roots if x.denominator == 1] + [0]
    rho = max(1, max(ints) + 1)
    delta_bound = max(int(-(-abs(x) // 1)) for x in roots)
    nden = 1
    for x in roots:
        nden = nden * x.denominator // gcd(nden, x.denominator)
    conn.exponents = {"finite": [Fraction(0)] * m, "infinity": roots}
    conn.rho = rho
    conn.Delta_bound = delta_bound
    conn.N_den = nden
    return conn.exponents


def _qmul(a, b):
    from .polyarith import qmul
    return qmul(a, b)


def _fp_poly_squarefree(c, p):
    c = [x % p for x in c]
    while c and c[-1] == 0:
        c.pop()
    if len(c) <= 2:
        return bool(c)
    try:
        ffield.factor_squarefree_mod_p(c, p)
        return True
    except NotSquarefree:
        return False


def _res_mod_p(conn, p):
    out = []
    for c in conn.res:
        c = Fraction(c)
        if c.denominator % p == 0:
            return None
        out.append(c.numerator * pow(c.denominator, -1, p) % p)
    return out


def _is_prime(p):
    return p >= 2 and sympy.isprime(p)


def assumption_gate(surface, conn=None, stop_early=False):
    """Return the list of ``AssumptionViolation`` objects (empty list means pass).

    Codes in ``SOFT_VIOLATIONS`` can be waived by a relaxed run; all others block.
    """
    p, g, h = surface.p, surface.g, surface.h
    delta = surface.delta_x
    out = []

    def fail(code, msg, **ctx):
        out.append(AssumptionViolation(code, msg, **ctx))

    # (a)
    if not (_is_prime(p) and p % 2 == 1 and gcd(p, delta) == 1 and delta % 2 == 1 and g >= 1):
        fail("PRIME_NOT_ADMISSIBLE", f"need an odd prime p with gcd(p, 2g+1) = 1 (p={p}, 2g+1={delta})")
        return out
    if surface.Q.get((delta, 0)) != 1 or any(a > delta for a, _ in surface.Q):
        fail("SHAPE_NOT_SIMPLEX", "Q must be monic in X")
        return out
    if conn is None:
        conn = connection_matrix(surface)
    # (b)
    resp = _res_mod_p(conn, p)
    res_deg = len(conn.res) - 1
    if resp is None or res_deg < 0 or resp[-1] % p == 0 or resp[0] % p == 0:
        fail("RESULTANT_DEGENERATE", "resultant must have unit leading coefficient and res(0) != 0 mod p")
    # (c)
    rbar = _res_mod_p(ConnectionData(b=[], r=[], res=conn.r, d=0, AdjM_degree=0, g=g), p)
    if rbar is None or not _fp_poly_squarefree(rbar, p) or conn.b_degree >= conn.d:
        fail("POLES_NOT_SIMPLE", "r mod p must be squarefree and deg b < deg r")
    elif resp is not None and res_deg != conn.d:
        fail("POLES_NOT_SIMPLE", "r must equal the full resultant up to a constant")
    # (d)
    try:
        local_exponent_data(conn, strict=False)
        if not conn.prepared:
            fail("EXPONENTS_NOT_PREPARED", "two exponents at infinity differ by an integer")
        if conn.rho != 1:
            fail("EXPONENTS_NOT_PREPARED", "positive integer exponent at infinity")
    except (NonNilpotentMonodromy, UnpreparedExponents, ZeroEigenvalueAtInfinity) as exc:
        fail("NONNILPOTENT_OR_IRRATIONAL", str(exc))
    # (e)
    shape_ok = (h % 2 == 1 and surface.Q.get((0, h)) == 1 and surface.Q.get((0, 0)) == 1
                and all(a * h + b * delta <= h * delta for a, b in surface.Q))
    if not shape_ok:
        fail("SHAPE_NOT_SIMPLEX", "Q must be monic in Gamma of odd degree h, constant term 1, "
             "supported in the simplex")
    if gcd(delta, h) != 1 or gcd(h, p) != 1:
        fail("COPRIME_DEGREES", "2g+1, h and p must be pairwise coprime")
    # (f)
    Qbar = surface.Qbar()
    fib0 = [Qbar.get((a, 0), 0) for a in range(delta + 1)]
    if not _fp_poly_squarefree(fib0, p):
        fail("NONDEGENERATE_FIBER0", "Q(X, 0) is not squarefree mod p")
    axis = [Qbar.get((0, b), 0) for b in range(h + 1)]
    if not _fp_poly_squarefree(axis, p):
        fail("NONDEGENERATE_AXIS", "Q(0, Gamma) is not squarefree mod p")
    # (f) singular points and (g) nodal fibres
    if resp is not None and _fp_poly_squarefree(resp, p):
        for fac in ffield.factor_squarefree_mod_p(resp, p):
            try:
                fd = singular_fiber_data(surface, fac)
            except FiberNotNodal as exc:
                fail("FIBER_NOT_NODAL", str(exc), factor=fac)
                continue
            if fd["Q_gamma_at_node"].is_zero():
                fail("SINGULAR_SURFACE", "Q, Q_X, Q_Gamma have a common zero", factor=fac)
    elif resp is not None:
        fail("FIBER_NOT_NODAL", "resultant not squarefree mod p, fibres cannot all be nodal")
    if stop_early and out:
        raise out[0]
    return out


def singular_fiber_data(surface, fac):
    """Node data of the fibre over the closed point ``fac(Gamma) = 0`` of the reduction."""
    p = surface.p
    if len(fac) == 2:
        K = ffield.FqField(p, (0, 1))
        gamma = K(-fac[0])
    else:
        K = ffield.FqField(p, tuple(fac))
        gamma = K.gen()
    Qbar = surface.Qbar()
    delta = surface.delta_x
    coeffs = []
    for a in range(delta + 1):
        acc = K.zero()
        for (a2, b), c in Qbar.items():
            if a2 == a:
                acc = acc + K(c) * gamma ** b
        coeffs.append(acc)
    alpha, H, dlt = ffield.unique_double_point(coeffs)
    qg = K.zero()
    for (a, b), c in Qbar.items():
        if b:
            qg = qg + K(c * b) * alpha ** a * gamma ** (b - 1)
    return {"degree": len(fac) - 1, "field": K, "gamma": gamma, "alpha": alpha, "H": H,
            "delta": dlt, "Q_gamma_at_node": qg, "factor": list(fac)}


def betti_degree(g, h):
    """``l*(2D) - 2 l*(D) - 3 - sum over 2-faces (l*(F) - 1)`` for the simplex D with vertices
    0, (2g+1)e1, h e2, 2 e3."""
    a0, b0, c0 = 2 * g + 1, h, 2

    def interior_3d(k):
        A, B, C = k * a0, k * b0, k * c0
        cnt = 0
        for x in range(1, A):
            for y in range(1, B):
                for z in range(1, C):
                    # strictly inside x/A + y/B + z/C < 1
                    if x * B * C + y * A * C + z * A * B < A * B * C:
                        cnt += 1
        return cnt

    def interior_tri(A, B):
        return sum(1 for x in range(1, A) for y in range(1, B) if x * B + y * A < A * B)

    def interior_slanted():
        # relative interior of the face x/a0 + y/b0 + z/c0 = 1 with x, y, z > 0
        cnt = 0
        for x in range(1, a0):
            for y in range(1, b0):
                for z in range(1, c0):
                    if x * b0 * c0 + y * a0 * c0 + z * a0 * b0 == a0 * b0 * c0:
                        cnt += 1
        return cnt

    faces = [interior_tri(a0, b0), interior_tri(a0, c0), interior_tri(b0, c0), interior_slanted()]
    return interior_3d(2) - 2 * interior_3d(1) - 3 - sum(f - 1 for f in faces)
