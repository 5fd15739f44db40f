"""Reduction of 1-forms on the base modulo the image of the connection.

A form ``sum_k U_k r^k dGamma`` with ``U_k`` vectors of polynomials is rewritten as
``nabla(.)`` plus a combination of ``b_ik = Gamma^i e_k / r dGamma`` with ``i <= d - 2``.

The exact step functions work over ``Fraction``; the batched path works on residues
modulo ``p^M`` and processes all columns of the Frobenius matrix in lockstep, packing
the columns of each row into one big integer.
"""

from dataclasses import dataclass
from fractions import Fraction

from .errors import InsufficientPrecision
from .padic import exact_div, vp
from .polyarith import (RadixBase, derivative, divmod_monic, mul, qdivmod, qinvmod, qmul, qtrim,
                        to_residues, trim)

# exact rational steps ----------------------------------------------------------


def _qadd(a, b):
    n = max(len(a), len(b))
    return qtrim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def _qsub(a, b):
    return _qadd(a, [-x for x in b])


def _qscale(a, c):
    return qtrim([c * x for x in a])


def _qderiv(a):
    return qtrim([i * a[i] for i in range(1, len(a))])


def _matvec(b, V):
    m = len(V)
    return [_sum_polys([qmul(b[s][t], V[t]) for t in range(m)]) for s in range(m)]


def _sum_polys(ps):
    out = []
    for q in ps:
        out = _qadd(out, q)
    return out


def _solve_exact(A, y):
    """Solve ``A x = y`` over Q by Gauss-Jordan elimination (``A`` square, nonsingular)."""
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(y[i])] for i, row in enumerate(A)]
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c]), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        M[c], M[piv] = M[piv], M[c]
        inv = 1 / M[c][c]
        M[c] = [x * inv for x in M[c]]
        for i in range(n):
            if i != c and M[i][c]:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return [M[i][n] for i in range(n)]


def _pad(a, n):
    a = list(a)
    return a + [Fraction(0)] * (n - len(a))


def reduce_finite_pole_step(U, ell, conn):
    """``U / r^(ell+1) dGamma = nabla(V / r^ell) + W / r^ell dGamma`` with ``deg V < d``.

    ``U`` is a list of ``m`` Fraction coefficient lists. Returns ``(V, W)``.
    """
    m, r, b, d = conn.m, conn.r, conn.b, conn.d
    U = [qtrim(u) for u in U]
    if not any(U):
        return [[] for _ in range(m)], [[] for _ in range(m)]
    rp = _qderiv(r)
    # linear map V -> (-ell r' + b) V mod r on (Q[G]/r)^m, in the monomial basis
    cols = []
    for t in range(m):
        for e in range(d):
            V = [[] for _ in range(m)]
            V[t] = [Fraction(0)] * e + [Fraction(1)]
            img = _matvec(b, V)
            img = [_qsub(img[s], _qscale(qmul(rp, V[s]), ell)) for s in range(m)]
            cols.append([c for s in range(m) for c in _pad(qdivmod(img[s], r)[1], d)])
    A = [[cols[j][i] for j in range(m * d)] for i in range(m * d)]
    rhs = [c for s in range(m) for c in _pad(qdivmod(U[s], r)[1], d)]
    x = _solve_exact(A, rhs)
    V = [qtrim(x[s * d:(s + 1) * d]) for s in range(m)]
    img = _matvec(b, V)
    img = [_qsub(_qsub(img[s], _qscale(qmul(rp, V[s]), ell)), U[s]) for s in range(m)]
    X = []
    for s in range(m):
        q, rem = qdivmod(img[s], r)
        if rem:
            raise AssertionError("finite-pole step: numerator not divisible by r")
        X.append(q)
    W = [_qsub([-c for c in X[s]], _qderiv(V[s])) for s in range(m)]
    return V, W


def reduce_infinity_step(U, conn):
    """``U / r dGamma = nabla(V Gamma^ell) + W / r dGamma`` with ``V`` constant and
    ``deg W < deg U``; ``ell = deg U - d + 1 >= 0``. Returns ``(V, ell, W)``.

    A zero vector returns ``(0, None, U)``.
    """
    m, r, b, d = conn.m, conn.r, conn.b, conn.d
    U = [qtrim(u) for u in U]
    deg = max((len(u) - 1 for u in U), default=-1)
    if deg < 0:
        return [Fraction(0)] * m, None, U
    ell = deg - d + 1
    if ell < 0:
        raise ValueError("no pole at infinity to reduce")
    top = [u[deg] if len(u) > deg else Fraction(0) for u in U]
    btop = conn.b_coeff(d - 1)
    lc = Fraction(r[-1])
    A = [[btop[s][t] + (ell * lc if s == t else 0) for t in range(m)] for s in range(m)]
    V = _solve_exact(A, top)
    W = []
    for s in range(m):
        acc = list(U[s])
        # subtract (ell r Gamma^(ell-1) + b Gamma^ell) V
        sub = [Fraction(0)] * (deg + 1)
        if ell:
            for i, c in enumerate(r):
                sub[i + ell - 1] += ell * c * V[s]
        for t in range(m):
            for i, c in enumerate(b[s][t]):
                sub[i + ell] += c * V[t]
        W.append(_qsub(acc, sub))
    return V, ell, W


def nabla(v, conn):
    """``nabla`` of a vector of rational functions ``(num, k)`` meaning ``num / r^k``.

    Returns ``(num, k + 1)`` with ``nabla(num / r^k) = out_num / r^(k+1) dGamma``.
    """
    num, k = v
    r = conn.r
    rp = _qderiv(r)
    bn = _matvec(conn.b, num)
    out = []
    for s in range(conn.m):
        t = _qsub(qmul(r, _qderiv(num[s])), _qscale(qmul(rp, num[s]), k))
        out.append(_qadd(t, bn[s]))
    return out, k + 1


def reduce_to_basis_exact(forms, conn, generic=False):
    """Coordinates on ``b_ik`` of ``sum_k forms[k] r^k dGamma`` (exact, for tests).

    ``forms`` maps integer ``k`` to a vector of ``m`` Fraction polynomials.
    Returns a list of length ``m (d - 1)`` indexed by ``i * m + k``.
    """
    m, r, d = conn.m, conn.r, conn.d
    ks = sorted(forms)
    lo = min(ks) if ks else -1
    acc = {k: [qtrim(u) for u in forms[k]] for k in ks}
    for k in range(lo, -1):
        U = acc.pop(k, [[] for _ in range(m)])
        ell = -k - 1
        # normalise numerator degrees below d by pushing the quotient up a level
        qs = [qdivmod(u, r) if u else ([], []) for u in U]
        up = [q for q, _ in qs]
        U = [rem for _, rem in qs]
        _, W = reduce_finite_pole_step(U, ell, conn)
        nxt = acc.get(k + 1, [[] for _ in range(m)])
        acc[k + 1] = [_qadd(_qadd(nxt[s], W[s]), up[s]) for s in range(m)]
    total = [[] for _ in range(m)]
    for k, U in acc.items():
        # U r^k = (U r^(k+1)) / r
        rp = [Fraction(1)]
        for _ in range(k + 1):
            rp = qmul(rp, r)
        total = [_qadd(total[s], qmul(U[s], rp)) for s in range(m)]
    while True:
        deg = max((len(u) - 1 for u in total), default=-1)
        if deg < d - 1:
            break
        if generic and deg == d - 1:
            return _generic_cokernel(total, conn)
        _, _, total = reduce_infinity_step(total, conn)
    return [(_pad(total[s], d - 1)[i]) for i in range(d - 1) for s in range(m)]


def _generic_cokernel(U, conn):
    """Quotient of ``{U / r : deg U <= d-1}`` by ``{b V / r : V constant}`` by linear algebra.

    Coordinates are taken on the complement spanned by ``Gamma^i e_k``, ``i <= d-2``,
    which is a complement whenever ``b_{d-1}`` is invertible.
    """
    m, d = conn.m, conn.d
    btop = conn.b_coeff(d - 1)
    top = [(_pad(u, d))[d - 1] for u in U]
    V = _solve_exact(btop, top)
    bV = _matvec(conn.b, [[x] for x in V])
    rest = [_qsub(U[s], bV[s]) for s in range(m)]
    return [(_pad(rest[s], d - 1)[i]) for i in range(d - 1) for s in range(m)]


# residue tables ------------------------------------------------------------------


@dataclass
class ReductionTables:
    """Matrices for the batched reduction, as residues modulo ``p^M``.

    ``Psi[j]`` are ``md x md`` with ``W = sum_j ell^-j Psi[j] U`` for a finite-pole step at
    level ``ell``; ``inf_det``/``inf_adj`` give ``(ell I + b_{d-1})^-1 = adj / det``.
    """

    p: int
    M: int
    m: int
    d: int
    r: list
    b: list
    Psi: list
    btop: list
    Mk: list

    def inf_solve_data(self, ell):
        mod = self.p ** self.M
        m = self.m
        A = [[(self.btop[s][t] + (ell if s == t else 0)) % mod for t in range(m)] for s in range(m)]
        from .padic import adjugate, berkowitz_mod
        c = berkowitz_mod(A, mod)
        det = (-1) ** m * c[-1] % mod
        adj = [[x % mod for x in row] for row in adjugate(A, 1, 0)]
        return det, adj


def _poly_vec_apply(op, m, d, mod):
    cols = []
    for t in range(m):
        for e in range(d):
            V = [[0] * d for _ in range(m)]
            V[t][e] = 1
            out = op(V)
            cols.append([(out[s][i] if i < len(out[s]) else 0) % mod for s in range(m) for i in range(d)])
    return [[cols[j][i] for j in range(m * d)] for i in range(m * d)]


def build_tables(conn, p, M):
    m, d = conn.m, conn.d
    if Fraction(conn.r[-1]) != 1:
        raise ValueError("the residue path needs a monic r")
    mod = p ** M
    r = to_residues(conn.r, mod)
    rp = [i * r[i] % mod for i in range(1, len(r))]
    R = to_residues(qinvmod(_qderiv(conn.r), conn.r), mod)
    b = [[to_residues(conn.b[i][j], mod) for j in range(m)] for i in range(m)]
    btop = [[(b[s][t][d - 1] if len(b[s][t]) >= d else 0) for t in range(m)] for s in range(m)]

    def rem(a):
        return _padr(divmod_monic(a, r, mod)[1], d)

    def quo(a):
        return _padr(divmod_monic(a, r, mod)[0], d)

    def mulR(V):
        return [rem(mul(R, v, mod)) for v in V]

    def mulN(V):
        RV = mulR(V)
        out = []
        for s in range(m):
            acc = [0] * (2 * d)
            for t in range(m):
                pr = mul(b[s][t], RV[t], mod)
                for i, c in enumerate(pr):
                    acc[i] += c
            out.append(rem([c % mod for c in acc]))
        return out

    def Mk_op(k):
        def op(V):
            W = mulR(V)
            for _ in range(k):
                W = _apply_b_mod(W)
            return W
        return op

    def _apply_b_mod(V):
        # N = b R acting on already-R-multiplied vectors means: N^k R = (b R)^k R
        return mulN(V)

    def q_rp(V):
        return [quo(mul(rp, v, mod)) for v in V]

    def q_b_plus_D(V):
        out = []
        for s in range(m):
            acc = [0] * (2 * d)
            for t in range(m):
                pr = mul(b[s][t], V[t], mod)
                for i, c in enumerate(pr):
                    acc[i] += c
            qb = quo([c % mod for c in acc])
            dv = derivative(V[s], mod)
            out.append([(x + (dv[i] if i < len(dv) else 0)) % mod for i, x in enumerate(qb)])
        return out

    Mk = [_poly_vec_apply(Mk_op(k), m, d, mod) for k in range(m)]
    QRP = _poly_vec_apply(q_rp, m, d, mod)
    QBD = _poly_vec_apply(q_b_plus_D, m, d, mod)
    n = m * d
    Psi = []
    for j in range(m + 1):
        P = [[0] * n for _ in range(n)]
        if j < m:
            T = _matmul(QRP, Mk[j], mod)
            for i in range(n):
                for k in range(n):
                    P[i][k] = (P[i][k] - T[i][k]) % mod
        if j >= 1:
            T = _matmul(QBD, Mk[j - 1], mod)
            for i in range(n):
                for k in range(n):
                    P[i][k] = (P[i][k] + T[i][k]) % mod
        Psi.append(P)
    return ReductionTables(p=p, M=M, m=m, d=d, r=r, b=b, Psi=Psi, btop=btop, Mk=Mk)


def _padr(a, n):
    a = list(a)[:n]
    return a + [0] * (n - len(a))


def _matmul(A, B, mod):
    n, k, m = len(A), len(B), len(B[0])
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(A[i], Bt[j])) % mod for j in range(m)] for i in range(n)]


def check_tables(tables, conn, ells):
    """Verify ``(-ell r' + b) V = U mod r`` for the residue tables at a few levels."""
    p, M, m, d = tables.p, tables.M, tables.m, tables.d
    mod = p ** M
    r = tables.r
    rp = [i * r[i] % mod for i in range(1, len(r))]
    for ell in ells:
        v = vp(ell, p)
        if v * m >= M // 2:
            continue
        for t in range(m):
            for e in range(d):
                U = [0] * (m * d)
                U[t * d + e] = 1
                # V = -sum_k ell^(-k-1) M_k U, computed with ell^m scaling
                Vs = [0] * (m * d)
                for k in range(m):
                    col = [row[t * d + e] for row in tables.Mk[k]]
                    f = pow(ell, m - k - 1)
                    for i in range(m * d):
                        Vs[i] -= f * col[i]
                V = [[Vs[s * d + i] % mod for i in range(d)] for s in range(m)]
                for s in range(m):
                    acc = [0] * (2 * d)
                    for tt in range(m):
                        for i, c in enumerate(mul(tables.b[s][tt], V[tt], mod)):
                            acc[i] += c
                    for i, c in enumerate(mul(rp, V[s], mod)):
                        acc[i] -= ell * c
                    res = _padr(divmod_monic([c % mod for c in acc], r, mod)[1], d)
                    target = [(ell ** m if (s == t and i == e) else 0) for i in range(d)]
                    if any((x - y) % mod for x, y in zip(res, target)):
                        raise AssertionError("reduction table check failed", ell)
    return True


# batched residue path ------------------------------------------------------------------


def _flog(x, p):
    k = 0
    while x >= p:
        x //= p
        k += 1
    return k


def arithmetic_loss(conn, p, levels, inf_steps):
    """Worst-case number of p-divisions made by the residue path (a budget, not a bound on
    the error of the inputs)."""
    from .padic import berkowitz
    m, d = conn.m, conn.d
    loss = sum(m * vp(ell, p) for ell in range(1, levels + 1))
    btop = conn.b_coeff(d - 1)
    for ell in range(0, inf_steps + 1):
        A = [[btop[s][t] + (ell if s == t else 0) for t in range(m)] for s in range(m)]
        c = berkowitz(A, Fraction(1))
        det = c[-1]
        if det == 0:
            raise ZeroDivisionError("singular infinity step")
        loss += max(0, vp(det, p))
    return loss


@dataclass
class H2Frobenius:
    """Matrix of Frobenius on ``H^2`` in the basis ``b_ik`` (index ``i * m + k``).

    ``scaled`` holds residues for ``value * p^shift`` modulo ``p^(N + shift)``.
    """

    p: int
    N: int
    shift: int
    scaled: list

    @property
    def dim(self):
        return len(self.scaled)

    @property
    def ord(self):
        vals = [vp(x, self.p) for row in self.scaled for x in row if x % self.p ** (self.N + self.shift)]
        return min(vals) - self.shift if vals else self.N


def frobenius_on_H2(G, conn, N3, headroom=None, threads=1):
    """Frobenius matrix on ``H^2`` from the r-adic window ``G`` of ``F(Gamma) / r(Gamma^p)``."""
    p = G.p
    S = headroom if headroom is not None else 2 * _flog(G.offset + 1, p) + 2
    while True:
        try:
            return _frobenius_on_H2(G, conn, N3, S)
        except InsufficientPrecision:
            S += 3


def _frobenius_on_H2(G, conn, N3, S):
    p, m, d = G.p, conn.m, conn.d
    levels = G.offset - 1
    extra_max = p * (d - 1) - 1
    # T = U_{-1} + sum_{k >= 0} h_k r^(k+1) has degree below d (hi + ceil(extra / d) + 1)
    inf_steps = d * (G.hi + -(-extra_max // d) + 1)
    loss = arithmetic_loss(conn, p, levels, inf_steps)
    M = N3 + S + G.shift + loss + 2
    mod = p ** M
    tables = build_tables(conn, p, M + m * _flog(max(levels, 1), p))
    tmod = p ** tables.M
    base = RadixBase(to_residues(conn.r, mod), mod)
    lift = p ** S
    ncols = m * (d - 1)
    # digits[k][c] = vector (length m*d) of column c at r-adic index k
    lo = -G.offset
    # column i * m + k holds Gamma^(p(i+1)-1) G[., k]
    shifted = {(j, k): G.terms_shifted(j, k, p - 1, p, d - 1) for j in range(m) for k in range(m)}
    per_col = [[shifted[j, k][i] for j in range(m)] for i in range(d - 1) for k in range(m)]
    hi_idx = max(max(c.keys()) for comps in per_col for c in comps)
    width = mod.bit_length() + tmod.bit_length() + (m * d).bit_length() + 2

    def col_vector(c, kk):
        vec = []
        for j in range(m):
            dg = per_col[c][j].get(kk)
            if dg is None:
                vec.extend([0] * d)
            else:
                vec.extend([(x * lift) % mod for x in dg] + [0] * (d - len(dg)))
        return vec

    n = m * d
    current = [col_vector(c, lo) for c in range(ncols)]
    for k in range(lo, -1):
        ell = -k - 1
        v = vp(ell, p)
        unit = ell // p ** v
        # Psi(ell) = sum_j ell^(m-j) Psi_j, then W = Psi(ell) U / ell^m
        Pl = [[0] * n for _ in range(n)]
        for j in range(m + 1):
            f = pow(ell, m - j, tmod)
            Pj = tables.Psi[j]
            for a in range(n):
                rowP = Pl[a]
                rowJ = Pj[a]
                for bb in range(n):
                    rowP[bb] += f * rowJ[bb]
        Pl = [[x % tmod for x in row] for row in Pl]
        packed = [_pack([current[c][t] for c in range(ncols)], width) for t in range(n)]
        out_rows = []
        for a in range(n):
            acc = 0
            row = Pl[a]
            for t in range(n):
                if row[t]:
                    acc += row[t] * packed[t]
            out_rows.append(_unpack(acc, width, ncols))
        inv_unit = pow(unit, -m, mod)
        pv = p ** (m * v)
        nxt = [col_vector(c, k + 1) for c in range(ncols)]
        for c in range(ncols):
            vec = nxt[c]
            for a in range(n):
                x = out_rows[a][c] % tmod
                if v:
                    x = exact_div(x, pv)
                vec[a] = (vec[a] + x * inv_unit) % mod
        current = nxt
    # current holds U_{-1}; assemble U_{-1} / r + sum_{k >= 0} h_k r^k as T / r
    cols_out = []
    for c in range(ncols):
        T = []
        for j in range(m):
            digits = [current[c][j * d:(j + 1) * d]]
            for kk in range(0, hi_idx + 1):
                dg = per_col[c][j].get(kk)
                digits.append([(x * lift) % mod for x in dg] if dg is not None else [0] * d)
            T.append(trim(base.from_digits(digits)))
        cols_out.append(_reduce_infinity_residues(T, conn, tables, p, mod, inf_steps))
    mat = [[cols_out[c][row] for c in range(ncols)] for row in range(ncols)]
    # the factor p of Frobenius on dGamma
    return _finish(mat, p, N3, S + G.shift, mod)


def _finish(mat, p, N3, shift, mod):
    # multiply by p: reduce the shift when possible
    if shift >= 1:
        shift -= 1
    else:
        mat = [[x * p % mod for x in row] for row in mat]
    t = shift
    for row in mat:
        for x in row:
            if x:
                t = min(t, vp(x, p))
    pt = p ** t
    outmod = p ** (N3 + shift - t)
    mat = [[(x // pt) % outmod for x in row] for row in mat]
    return H2Frobenius(p=p, N=N3, shift=shift - t, scaled=mat)


def _pack(vals, width):
    out = 0
    for i, x in enumerate(vals):
        out |= x << (width * i)
    return out


def _unpack(x, width, count):
    mask = (1 << width) - 1
    return [(x >> (width * i)) & mask for i in range(count)]


def _reduce_infinity_residues(T, conn, tables, p, mod, max_ell):
    """Monomial reduction at infinity of ``T / r dGamma``; returns coordinates ``i * m + k``."""
    m, d = tables.m, tables.d
    if max((len(t) for t in T), default=0) - d > max_ell:
        raise AssertionError("pole order at infinity exceeds the loss budget")
    r = [x % mod for x in tables.r]
    b = [[[x % mod for x in e] for e in row] for row in tables.b]
    T = [list(t) for t in T]
    deg = max((len(t) - 1 for t in T), default=-1)
    size = max(deg + 1, d)
    T = [t + [0] * (size - len(t)) for t in T]
    cache = {}
    M = vp(mod, p)
    lost = 0
    for D in range(deg, d - 2, -1):
        ell = D - d + 1
        u = [T[s][D] % mod for s in range(m)]
        if not any(u):
            continue
        if ell not in cache:
            det, adj = _inf_data(tables, ell, mod)
            cache[ell] = (det, adj)
        det, adj = cache[ell]
        v = vp(det, p) if det else None
        if v is None:
            raise InsufficientPrecision("infinity step determinant vanishes to precision")
        unit_inv = pow(det // p ** v, -1, mod)
        V = []
        for s in range(m):
            x = sum(adj[s][t] * u[t] for t in range(m)) % mod
            if v:
                x = exact_div(x, p ** v)
            V.append(x * unit_inv % mod)
        for s in range(m):
            row = T[s]
            if ell:
                for i, c in enumerate(r):
                    row[i + ell - 1] = (row[i + ell - 1] - ell * c * V[s]) % mod
            for t in range(m):
                Vt = V[t]
                if Vt:
                    for i, c in enumerate(b[s][t]):
                        row[i + ell] = (row[i + ell] - c * Vt) % mod
        lost += v
        for s in range(m):
            # digits above p^(M - lost) are garbage left by the divisions
            if T[s][D] % p ** max(0, M - lost):
                raise AssertionError("infinity step did not cancel the leading term")
            T[s][D] = 0
    return [T[s][i] % mod for i in range(d - 1) for s in range(m)]


def _inf_data(tables, ell, mod):
    from .padic import adjugate, berkowitz_mod
    m = tables.m
    A = [[(tables.btop[s][t] + (ell if s == t else 0)) % mod for t in range(m)] for s in range(m)]
    c = berkowitz_mod(A, mod)
    det = (-1) ** m * c[-1] % mod
    adj = [[x % mod for x in row] for row in adjugate(A, 1, 0)]
    return det, adj
