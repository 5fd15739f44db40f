"""int64 kernels for point counting over F_q, with a numba path and a numpy fallback.

Elements of F_q^* are handled by their discrete logarithm (``-1`` encodes zero)
and addition goes through a Zech table, so every operation is int64.
Set ``FIBZETA_DISABLE_NUMBA=1`` to force the numpy implementation.
"""

import os

import numpy as np

USE_NUMBA = os.environ.get("FIBZETA_DISABLE_NUMBA", "").strip() in ("", "0")

if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        USE_NUMBA = False


def _count_loop(ma, mb, mc, q, zech, g_lo, g_hi):
    n = q - 1
    total = 0
    for gi in range(g_lo, g_hi):
        gl = gi - 1
        for xi in range(q):
            xl = xi - 1
            acc = -1
            for t in range(ma.shape[0]):
                a = ma[t]
                b = mb[t]
                if (a > 0 and xl < 0) or (b > 0 and gl < 0):
                    continue
                lt = mc[t]
                if a > 0:
                    lt += a * xl
                if b > 0:
                    lt += b * gl
                lt %= n
                if acc < 0:
                    acc = lt
                else:
                    z = zech[(lt - acc) % n]
                    if z < 0:
                        acc = -1
                    else:
                        acc = (acc + z) % n
            if acc < 0:
                total += 1
            elif acc % 2 == 0:
                total += 2
    return total


if USE_NUMBA:
    _count_loop_jit = njit(cache=False, nogil=True)(_count_loop)


def _count_numpy(ma, mb, mc, q, zech, g_lo, g_hi):
    n = q - 1
    xl = np.arange(q, dtype=np.int64) - 1
    xzero = xl < 0
    total = 0
    for gi in range(g_lo, g_hi):
        gl = gi - 1
        acc = np.full(q, -1, dtype=np.int64)
        for t in range(ma.shape[0]):
            a, b = int(ma[t]), int(mb[t])
            if b > 0 and gl < 0:
                continue
            lt = np.full(q, int(mc[t]) + (b * gl if b > 0 else 0), dtype=np.int64)
            live = np.ones(q, dtype=bool)
            if a > 0:
                lt = lt + a * xl
                live = ~xzero
            lt %= n
            fresh = live & (acc < 0)
            both = live & (acc >= 0)
            z = zech[(lt - acc) % n]
            acc = np.where(both, np.where(z < 0, -1, (acc + z) % n), acc)
            acc = np.where(fresh, lt, acc)
        total += int(np.count_nonzero(acc < 0)) + 2 * int(np.count_nonzero((acc >= 0) & (acc % 2 == 0)))
    return total


def count_points(ma, mb, mc, q, zech, g_lo=0, g_hi=None):
    """Number of ``(x, gamma, z)`` in F_q^3 with ``z^2 = sum c_t x^a_t gamma^b_t``.

    ``mc`` holds discrete logs of the (nonzero) coefficients; ``gamma`` runs over
    indices ``g_lo..g_hi-1`` where index 0 is zero and index k is ``g^(k-1)``.
    """
    if g_hi is None:
        g_hi = q
    ma = np.asarray(ma, dtype=np.int64)
    mb = np.asarray(mb, dtype=np.int64)
    mc = np.asarray(mc, dtype=np.int64)
    zech = np.asarray(zech, dtype=np.int64)
    if USE_NUMBA:
        return int(_count_loop_jit(ma, mb, mc, q, zech, g_lo, g_hi))
    return _count_numpy(ma, mb, mc, q, zech, g_lo, g_hi)


def count_points_python(ma, mb, mc, q, zech, g_lo=0, g_hi=None):
    """Uncompiled reference loop, used by the benchmark."""
    if g_hi is None:
        g_hi = q
    return _count_loop(np.asarray(ma, dtype=np.int64), np.asarray(mb, dtype=np.int64),
                       np.asarray(mc, dtype=np.int64), q, np.asarray(zech, dtype=np.int64),
                       g_lo, g_hi)
