"""Point-counting kernel timings: numba, numpy fallback and the plain Python loop.

    python benchmarks/bench_kernels.py [--p 7] [--s 2]
"""

import argparse
import time

from fibzeta import _kernels
from fibzeta.ffield import FqField, _monomials_in
from fibzeta.pencil import SurfaceInput

SURFACE = {(3, 0): 1, (0, 3): 1, (0, 0): 1, (0, 1): -2, (1, 1): 3, (2, 0): 1}


def timed(fn, *args, repeat=3):
    best = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn(*args)
        el = time.perf_counter() - t
        best = el if best is None else min(best, el)
    return out, best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--p", type=int, default=7)
    ap.add_argument("--s", type=int, default=2)
    ap.add_argument("--python-rows", type=int, default=None,
                    help="gamma rows for the pure Python loop (default: all when q <= 400)")
    args = ap.parse_args()
    p, s = args.p, args.s
    q = p ** s
    F = FqField(p, s=s)
    _, _, zech = F.log_tables()
    ma, mb, mc = _monomials_in(SurfaceInput(p, SURFACE).Qbar(), F)
    import numpy as np
    ma, mb, mc = (np.asarray(x, dtype=np.int64) for x in (ma, mb, mc))
    zech = np.asarray(zech, dtype=np.int64)
    print(f"q = {q}, {q * q} points, {len(ma)} monomials")
    rows = {}
    if _kernels.USE_NUMBA:
        _kernels._count_loop_jit(ma, mb, mc, q, zech, 0, 1)  # compile
        rows["numba"] = timed(_kernels._count_loop_jit, ma, mb, mc, q, zech, 0, q)
    rows["numpy"] = timed(_kernels._count_numpy, ma, mb, mc, q, zech, 0, q)
    g_hi = args.python_rows or (q if q <= 400 else max(1, q // 50))
    out, el = timed(_kernels.count_points_python, ma, mb, mc, q, zech, 0, g_hi, repeat=1)
    rows["python"] = (out if g_hi == q else None, el * q / g_hi)
    ref = rows["numpy"][0]
    for name, (out, el) in rows.items():
        note = "" if out is None else ("" if out == ref else "  MISMATCH")
        est = " (extrapolated)" if out is None else ""
        print(f"{name:7s} {el * 1e3:10.2f} ms{est}{note}")


if __name__ == "__main__":
    main()
