"""Local solutions of the Picard-Fuchs system, the local Frobenius ``F(Gamma)`` and its
continuation to an r-adic window.

Series coefficients are stored as integers ``x`` standing for ``x / p^shift``,
truncated modulo ``p^(N + shift)``; ``N`` is the nominal absolute precision.
"""

from dataclasses import dataclass

from .errors import InsufficientPrecision, WindowTooSmall
from .padic import PadicApprox, exact_div, vp
from .polyarith import RadixBase, divmod_monic, mul, series_inv, to_residues


@dataclass
class LocalSeriesMatrix:
    p: int
    N: int
    shift: int
    coeffs: list  # coeffs[l][i][j]

    @property
    def m(self):
        return len(self.coeffs[0])

    def __len__(self):
        return len(self.coeffs)

    def value(self, l, i, j):
        x = self.coeffs[l][i][j]
        p, s, N = self.p, self.shift, self.N
        x %= p ** (N + s)
        if not x:
            return PadicApprox.zero(p, N)
        v = vp(x, p)
        return PadicApprox(p, N, v - s, (x // p ** v) % p ** (N + s - v))

    def entry_poly(self, i, j):
        return [c[i][j] for c in self.coeffs]

    def normalized(self):
        """Divide out the largest power of ``p`` common to all coefficients and the shift."""
        t = self.shift
        for c in self.coeffs:
            for row in c:
                for x in row:
                    if x:
                        t = min(t, vp(x, self.p))
                        if t == 0:
                            return self
        pt = self.p ** t
        mod = self.p ** (self.N + self.shift - t)
        coeffs = [[[(x // pt) % mod for x in row] for row in c] for c in self.coeffs]
        return LocalSeriesMatrix(self.p, self.N, self.shift - t, coeffs)


def _flog(x, p):
    k = 0
    while x >= p:
        x //= p
        k += 1
    return k


def _conn_residues(conn, mod):
    m = conn.m
    r = to_residues(conn.r, mod)
    b = [[to_residues(conn.b[i][j], mod) for j in range(m)] for i in range(m)]
    deg_b = max((len(e) for row in b for e in row), default=0)
    bk = [[[b[i][j][k] if k < len(b[i][j]) else 0 for j in range(m)] for i in range(m)]
          for k in range(deg_b)]
    return r, bk


def local_fundamental_solution(conn, NG, N1, p, side="left", headroom=None):
    """Truncated solution ``D ~ C`` of ``dC/dGamma + B C = 0`` with ``C(0) = I`` (``side="left"``),
    or ``D ~ C^-1`` solving ``dE/dGamma - E B = 0`` (``side="dual"``)."""
    from .planner import bmp
    m = conn.m
    S = (2 * bmp(m, p) + 1) * _flog(max(NG, 1), p) + 1 if headroom is None else headroom
    while True:
        try:
            return _solve(conn, NG, N1, p, side, S)
        except InsufficientPrecision:
            S += 2


def _solve(conn, NG, N1, p, side, S):
    m = conn.m
    vmax = _flog(max(NG, 1), p)
    big = p ** (N1 + S + vmax)
    mod = p ** (N1 + S)
    r, bk = _conn_residues(conn, big)
    r0 = r[0]
    if r0 % p == 0:
        raise ValueError("r(0) must be a p-adic unit")
    one = p ** S
    C = [[[one if i == j else 0 for j in range(m)] for i in range(m)]]
    dr = len(r)
    nb = len(bk)
    for n in range(NG - 1):
        acc = [[0] * m for _ in range(m)]
        for i in range(1, min(n + 2, dr)):
            c = r[i] * (n + 1 - i)
            if c:
                Ck = C[n + 1 - i]
                for a in range(m):
                    ra = acc[a]
                    Ca = Ck[a]
                    for b_ in range(m):
                        ra[b_] += c * Ca[b_]
        for i in range(min(n + 1, nb)):
            Bi = bk[i]
            Ck = C[n - i]
            if side == "left":
                # B_i C_{n-i}
                for a in range(m):
                    Ba = Bi[a]
                    ra = acc[a]
                    for b_ in range(m):
                        ra[b_] += sum(Ba[t] * Ck[t][b_] for t in range(m))
            else:
                # -C_{n-i} B_i
                for a in range(m):
                    Ca = Ck[a]
                    ra = acc[a]
                    for b_ in range(m):
                        ra[b_] -= sum(Ca[t] * Bi[t][b_] for t in range(m))
        k = n + 1
        v = vp(k, p)
        unit = pow(r0 * (k // p ** v), -1, big)
        pv = p ** v
        new = []
        for a in range(m):
            row = []
            for b_ in range(m):
                x = (-acc[a][b_] * unit) % big
                if v:
                    x = exact_div(x, pv)
                row.append(x % mod)
            new.append(row)
        C.append(new)
    return LocalSeriesMatrix(p, N1, S, C)


def _matpoly_mul(A, B, mod, m, n):
    """Product of matrices of polynomials, truncated to ``n`` coefficients."""
    out = [[None] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            acc = [0] * n
            for k in range(m):
                pr = mul(A[i][k][:n], B[k][j][:n], mod)
                for t in range(min(n, len(pr))):
                    acc[t] += pr[t]
            out[i][j] = [x % mod for x in acc]
    return out


def _to_entry_polys(L):
    m = L.m
    return [[L.entry_poly(i, j) for j in range(m)] for i in range(m)]


def _from_entry_polys(P, p, N, shift, n):
    m = len(P)
    coeffs = [[[P[i][j][l] if l < len(P[i][j]) else 0 for j in range(m)] for i in range(m)]
              for l in range(n)]
    return LocalSeriesMatrix(p, N, shift, coeffs)


def deform_frobenius_local(C, C_dual, F0, p, NG):
    """``F(Gamma) = C(Gamma) F(0) C^-1(Gamma^p)`` modulo ``Gamma^NG``.

    ``F0`` is a ``FiberFrobenius``; the precision of the result is the nominal ``N1`` of
    the inputs, before the certified loss.
    """
    m = C.m
    N1 = min(C.N, C_dual.N, F0.N1)
    shift = C.shift + C_dual.shift + F0.shift
    mod = p ** (N1 + shift)
    F0r = F0.residues(N1)
    Cp = _to_entry_polys(C)
    CF = [[None] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            acc = [0] * NG
            for k in range(m):
                f = F0r[k][j]
                if f:
                    col = Cp[i][k]
                    for t in range(min(NG, len(col))):
                        acc[t] += col[t] * f
            CF[i][j] = [x % mod for x in acc]
    need = -(-NG // p)
    if len(C_dual) < need:
        raise ValueError("dual solution too short")
    Dp = [[None] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            poly = [0] * NG
            for l in range(need):
                if l * p < NG:
                    poly[l * p] = C_dual.coeffs[l][i][j]
            Dp[i][j] = poly
    P = _matpoly_mul(CF, Dp, mod, m, NG)
    return _from_entry_polys(P, p, N1, shift, NG).normalized()


def method2_frobenius_local(conn, F0, p, NG, N1, headroom=None):
    """Solve ``r r^s F' + r^s b F - p Gamma^(p-1) r F b^s = 0`` term by term (``^s``: Gamma -> Gamma^p).

    No certified loss bound is attached to this path.
    """
    m = conn.m
    S = headroom if headroom is not None else 2 * _flog(max(NG, 1), p) + 2 + F0.shift
    while True:
        try:
            return _method2(conn, F0, p, NG, N1, S)
        except InsufficientPrecision:
            S += 2


def _method2(conn, F0, p, NG, N1, S):
    m = conn.m
    vmax = _flog(max(NG, 1), p)
    big = p ** (N1 + S + vmax)
    mod = p ** (N1 + S)
    r, bk = _conn_residues(conn, big)
    rs = [0] * ((len(r) - 1) * p + 1)
    for i, c in enumerate(r):
        rs[i * p] = c
    A = mul(r, rs, big)
    Bl = [[[0] * (len(bk) + len(rs)) for _ in range(m)] for _ in range(m)]
    for k, Bk in enumerate(bk):
        for i in range(m):
            for j in range(m):
                if Bk[i][j]:
                    for t, c in enumerate(rs):
                        Bl[i][j][k + t] += c * Bk[i][j]
    Bl = [[[x % big for x in Bl[i][j]] for j in range(m)] for i in range(m)]
    Cr = [0] * (p - 1) + [p * c % big for c in r]
    Dr = {}
    for k, Bk in enumerate(bk):
        Dr[k * p] = Bk
    # F_0 = F(0), rescaled to the working shift
    if F0.shift > S:
        raise InsufficientPrecision("method 2 headroom below the fibre shift")
    lift = p ** (S - F0.shift)
    F = [[[x * lift % mod for x in row] for row in F0.residues(N1)]]
    A0 = A[0]
    nBl = len(Bl[0][0])
    for n in range(NG - 1):
        acc = [[0] * m for _ in range(m)]
        for i in range(1, min(n + 2, len(A))):
            c = A[i] * (n + 1 - i)
            if c:
                Fk = F[n + 1 - i]
                for a in range(m):
                    for b_ in range(m):
                        acc[a][b_] += c * Fk[a][b_]
        for i in range(min(n + 1, nBl)):
            Fk = F[n - i]
            for a in range(m):
                for b_ in range(m):
                    s = 0
                    for t in range(m):
                        s += Bl[a][t][i] * Fk[t][b_]
                    acc[a][b_] += s
        for i, c in enumerate(Cr):
            if not c or i > n:
                continue
            for j, Dj in Dr.items():
                if i + j > n:
                    continue
                Fk = F[n - i - j]
                for a in range(m):
                    for b_ in range(m):
                        s = 0
                        for t in range(m):
                            s += Fk[a][t] * Dj[t][b_]
                        acc[a][b_] -= c * s
        k = n + 1
        v = vp(k, p)
        unit = pow(A0 * (k // p ** v), -1, big)
        pv = p ** v
        new = []
        for a in range(m):
            row = []
            for b_ in range(m):
                x = (-acc[a][b_] * unit) % big
                if v:
                    x = exact_div(x, pv)
                row.append(x % mod)
            new.append(row)
        F.append(new)
    return LocalSeriesMatrix(p, N1, S, F).normalized()


@dataclass
class RAdicSeries:
    """Matrix ``G = F(Gamma) / r(Gamma^p)`` on the window ``[-offset, hi)`` of r-adic indices.

    ``poly[i][j]`` is the polynomial ``r^offset * G_ij`` truncated to degree ``< d * (offset + hi)``;
    values are residues for ``value * p^shift`` modulo ``p^(N + shift)``.
    """

    p: int
    N: int
    shift: int
    r: list
    offset: int
    hi: int
    poly: list

    @property
    def d(self):
        return len(self.r) - 1

    @property
    def window(self):
        return (-self.offset, self.hi)

    @property
    def modulus(self):
        return self.p ** (self.N + self.shift)

    def terms(self, i, j, extra=0):
        """Digits ``{k: f_k}`` of ``Gamma^extra * G_ij`` for ``k`` in ``[-offset, hi + ceil(extra/d))``."""
        mod = self.modulus
        base = RadixBase(self.r, mod)
        P = [0] * extra + list(self.poly[i][j])
        count = self.offset + self.hi + -(-extra // self.d)
        digits = base.to_digits(P, count)
        return {k - self.offset: dg for k, dg in enumerate(digits)}

    def terms_shifted(self, i, j, first, step, count):
        """``terms(i, j, first + t * step)`` for ``t < count``.

        One radix conversion, then each step multiplies every digit by ``Gamma^step`` and
        carries the quotient by ``r`` into the next digit.
        """
        mod, d, r = self.modulus, self.d, self.r
        out = [self.terms(i, j, first)]
        digits = [out[0][k] for k in sorted(out[0])]
        extra = first
        for _ in range(count - 1):
            extra += step
            nxt = []
            carry = []
            for dg in digits:
                t = [0] * step + list(dg)
                for a, c in enumerate(carry):
                    t[a] = (t[a] + c) % mod
                carry, rem = divmod_monic(t, r, mod)
                nxt.append(rem + [0] * (d - len(rem)))
            while any(carry):
                carry, rem = divmod_monic(carry, r, mod)
                nxt.append(rem + [0] * (d - len(rem)))
            want = self.offset + self.hi + -(-extra // d)
            if len(nxt) > want and any(any(x) for x in nxt[want:]):
                raise AssertionError("shifted expansion longer than the window")
            digits = (nxt + [[0] * d] * want)[:want]
            out.append({k - self.offset: dg for k, dg in enumerate(digits)})
        return out


def continuation_length(d, x_fin, x_inf, p):
    """Number of local Gamma-adic terms needed for the window ``[-(x_fin + p), x_inf)``."""
    return d * (x_fin + p + x_inf)


def analytic_continuation(F_local, conn, p, x_fin, x_inf, N2, check_top=True):
    """r-adic window of ``G = F / r(Gamma^p)`` from the local Gamma-adic expansion of ``F``."""
    d = conn.d
    offset = x_fin + p
    n = continuation_length(d, x_fin, x_inf, p)
    if len(F_local) < n:
        raise WindowTooSmall("window too small: local expansion shorter than the r-adic window",
                             have=len(F_local), need=n)
    shift = F_local.shift
    mod = p ** (N2 + shift)
    r = to_residues(conn.r, mod)
    rs = [0] * ((len(r) - 1) * p + 1)
    for i, c in enumerate(r):
        rs[i * p] = c
    inv = series_inv(rs, n, mod)
    rpow = [1]
    for _ in range(offset):
        rpow = mul(rpow, r, mod)
    mult = mul(rpow[:n], inv, mod)[:n]
    m = conn.m
    poly = [[mul([x % mod for x in F_local.entry_poly(i, j)[:n]], mult, mod)[:n] for j in range(m)]
            for i in range(m)]
    series = RAdicSeries(p=p, N=N2, shift=shift, r=r, offset=offset, hi=x_inf, poly=poly)
    if check_top:
        for i in range(m):
            for j in range(m):
                top = series.terms(i, j).get(x_inf - 1)
                if top and any(top):
                    raise WindowTooSmall("window too small: top r-adic digit does not vanish",
                                         entry=(i, j), index=x_inf - 1)
    return series


def dump_local(L, fh, label="gamma"):
    """Write ``entry i j | k | coeff-vector`` lines; the vector is the residue and its shift."""
    m = L.m
    fh.write(f"# {label} p={L.p} N={L.N} shift={L.shift}\n")
    for i in range(m):
        for j in range(m):
            for k, c in enumerate(L.coeffs):
                fh.write(f"entry {i} {j} | {k} | {c[i][j]}\n")


def dump_radic(G, fh):
    m = len(G.poly)
    fh.write(f"# r-adic p={G.p} N={G.N} shift={G.shift} window=[{-G.offset},{G.hi})\n")
    for i in range(m):
        for j in range(m):
            for k, dg in sorted(G.terms(i, j).items()):
                fh.write(f"entry {i} {j} | {k} | {' '.join(str(x) for x in dg)}\n")
