"""Orchestration: gate, plan, fibre, deformation, reduction, assembly, verification."""

import json
import logging
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .deformation import (analytic_continuation, continuation_length, deform_frobenius_local,
                          dump_local, dump_radic, local_fundamental_solution)
from .errors import AssumptionViolation, ManifestError, RerunRequired
from .kedlaya import kedlaya_fiber
from .pencil import SOFT_VIOLATIONS, SurfaceInput, assumption_gate, connection_matrix
from .planner import R_degree, check_rerun, flog, plan
from .reduction import frobenius_on_H2
from .zeta import assemble, require, verify_lefschetz

log = logging.getLogger("fibzeta")

PLAN_OVERRIDES = ("N3", "N1", "NG_inf")


@dataclass
class RunOptions:
    conjecture_finite_poles: bool = False
    verify: int = 0
    threads: int = 1
    dump_dir: object = None
    precision_override: dict = field(default_factory=dict)
    relax_gate: bool = False
    max_reruns: int = 2


@dataclass
class RunResult:
    report: dict
    timings: dict

    def report_json(self):
        return json.dumps(self.report, sort_keys=True, indent=2, default=_json_default) + "\n"


def _json_default(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    raise TypeError(f"not serialisable: {type(x).__name__}")


def parse_override(text):
    """``"N3=12,NG_inf=80"`` to a dict of integers."""
    out = {}
    if not text:
        return out
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        key, sep, val = part.partition("=")
        key = key.strip()
        if not sep or key not in PLAN_OVERRIDES:
            raise ValueError(f"bad precision override {part!r}; keys: {', '.join(PLAN_OVERRIDES)}")
        out[key] = int(val)
    return out


def gate(surface, conn, relax):
    violations = assumption_gate(surface, conn)
    waived = [v.violation for v in violations if relax and v.violation in SOFT_VIOLATIONS]
    blocking = [v for v in violations if not (relax and v.violation in SOFT_VIOLATIONS)]
    return blocking, sorted(set(waived)), violations


def make_plan(surface, conn, opts, ord_F0=0, N3=None):
    ov = opts.precision_override
    kw = {}
    if "NG_inf" in ov:
        kw["NG_inf_conjecture"] = ov["NG_inf"]
    pl = plan(conn.g, surface.h, conn.d, surface.p, conjecture_mode=opts.conjecture_finite_poles,
              ord_F0=ord_F0, N3=N3 if N3 is not None else ov.get("N3"),
              adj_degree=conn.AdjM_degree, res_degree=len(conn.res) - 1,
              R_deg=R_degree(surface.Q, surface.p), Delta_bound=conn.Delta_bound, N_den=conn.N_den,
              **kw)
    # the local expansion is longer than NG by the continuation margin; size N1 for it
    n = continuation_length(conn.d, pl.x_fin, pl.x_inf, surface.p)
    N1 = pl.N2 + (3 * pl.B + 1) * flog(n, surface.p) - pl.B - min(ord_F0, 0)
    if N1 > pl.N1:
        pl.flags.append(f"N1 raised from {pl.N1} to {N1} for local length {n}")
        pl.N1 = N1
    if "N1" in ov:
        pl.flags.append(f"N1 overridden to {ov['N1']}")
        pl.N1 = ov["N1"]
    return pl, n


def _stage(timings, name):
    class _T:
        def __enter__(self):
            self.t = time.perf_counter()
            log.info("stage %s", name)

        def __exit__(self, *exc):
            timings[name] = timings.get(name, 0.0) + time.perf_counter() - self.t
    return _T()


def compute(surface, opts, timings=None):
    """Run the pipeline and return ``(zeta factorisation, plan, extras)``; raises on failure."""
    timings = {} if timings is None else timings
    with _stage(timings, "connection"):
        conn = connection_matrix(surface)
    N3 = None
    reruns = 0
    while True:
        try:
            fz, pl, H = _compute_once(surface, conn, opts, N3, timings)
            return fz, pl, {"reruns": reruns, "conn": conn, "H": H}
        except RerunRequired as exc:
            if reruns >= opts.max_reruns:
                raise
            reruns += 1
            N3 = exc.suggested_N3
            log.info("rerun with N3=%s", N3)


def _compute_once(surface, conn, opts, N3, timings):
    p = surface.p
    with _stage(timings, "plan"):
        pl, n = make_plan(surface, conn, opts, N3=N3)
    with _stage(timings, "fiber"):
        kf = kedlaya_fiber(surface.fiber(0), p, pl.N1)
        if kf.ord < 0:
            pl, n = make_plan(surface, conn, opts, ord_F0=kf.ord, N3=N3)
            kf = kedlaya_fiber(surface.fiber(0), p, pl.N1)
    with _stage(timings, "deformation"):
        C = local_fundamental_solution(conn, n, pl.N1, p)
        Cd = local_fundamental_solution(conn, n, pl.N1, p, side="dual")
        F = deform_frobenius_local(C, Cd, kf, p, n)
    with _stage(timings, "continuation"):
        G = analytic_continuation(F, conn, p, pl.x_fin, pl.x_inf, pl.N2,
                                  check_top=opts.conjecture_finite_poles)
    with _stage(timings, "reduction"):
        H = frobenius_on_H2(G, conn, pl.N3, threads=opts.threads)
        check_rerun(pl, H.ord)
    with _stage(timings, "assembly"):
        fz = assemble(H, surface, conn, pl)
    if opts.dump_dir:
        _dump(opts.dump_dir, kf, F, G, H, pl)
    return fz, pl, H


def _dump(path, kf, F, G, H, pl):
    os.makedirs(path, exist_ok=True)
    with open(os.path.join(path, "fiber_frobenius.txt"), "w") as fh:
        fh.write(f"# F0 p={kf.p} N1={kf.N1} shift={kf.shift}\n")
        for row in kf.scaled:
            fh.write(" ".join(str(x) for x in row) + "\n")
    with open(os.path.join(path, "frobenius_local.txt"), "w") as fh:
        dump_local(F, fh, "F(Gamma)")
    with open(os.path.join(path, "radic_window.txt"), "w") as fh:
        dump_radic(G, fh)
    with open(os.path.join(path, "frobenius_H2.txt"), "w") as fh:
        fh.write(f"# H2 p={H.p} N={H.N} shift={H.shift}\n")
        for row in H.scaled:
            fh.write(" ".join(str(x) for x in row) + "\n")
    with open(os.path.join(path, "plan.json"), "w") as fh:
        json.dump(pl.as_dict(), fh, sort_keys=True, indent=2, default=_json_default)


def surface_dict(surface):
    return {"p": surface.p, "g": surface.g, "h": surface.h,
            "terms": [[c, a, b] for (a, b), c in sorted(surface.Q.items())]}


def run(surface, opts):
    """Full run; returns a ``RunResult``. Gate violations raise ``AssumptionViolation``."""
    timings = {}
    with _stage(timings, "gate"):
        conn = connection_matrix(surface)
        blocking, waived, _ = gate(surface, conn, opts.relax_gate)
    if blocking:
        exc = AssumptionViolation(blocking[0].violation, str(blocking[0]),
                                  codes=[v.violation for v in blocking])
        exc.violations = blocking
        raise exc
    fz, pl, extra = compute(surface, opts, timings)
    report = {
        "surface": surface_dict(surface),
        "provenance": {
            "conditional_on_finite_poles_conjecture": bool(opts.conjecture_finite_poles),
            "relaxed_gate": bool(opts.relax_gate),
            "waived_violations": waived,
            "precision_override": dict(sorted(opts.precision_override.items())),
            "reruns": extra["reruns"],
        },
        "plan": pl.as_dict(),
        "frobenius_H2": {"dim": extra["H"].dim, "ord": extra["H"].ord},
        "zeta": fz.as_dict(),
    }
    if opts.verify:
        with _stage(timings, "verification"):
            rep = verify_lefschetz(fz.Z_compact, surface, opts.verify, workers=opts.threads)
        report["verification"] = rep.as_dict()
        require(rep)
    return RunResult(report=report, timings=timings)


def parse_manifest(text):
    """Parse ``p = <prime>`` and ``term <c> <a> <b>`` lines; ``#`` starts a comment.

    Returns ``(SurfaceInput, settings)``; errors carry the 1-based line number.
    """
    p = None
    Q = {}
    settings = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if line.startswith("term"):
                parts = line.split()
                if len(parts) != 4:
                    raise ValueError("expected 'term <c> <a> <b>'")
                c, a, b = (int(x) for x in parts[1:])
                if a < 0 or b < 0:
                    raise ValueError("exponents must be non-negative")
                Q[(a, b)] = Q.get((a, b), 0) + c
            elif "=" in line:
                key, _, val = (s.strip() for s in line.partition("="))
                if key == "p":
                    p = int(val)
                elif key in ("verify", "s_max"):
                    settings["verify"] = int(val)
                elif key in ("conjecture_finite_poles",):
                    settings["conjecture_finite_poles"] = val.lower() in ("1", "true", "yes")
                elif key in PLAN_OVERRIDES:
                    settings.setdefault("precision_override", {})[key] = int(val)
                else:
                    raise ValueError(f"unknown key {key!r}")
            else:
                raise ValueError("unrecognised line")
        except ValueError as exc:
            raise ManifestError(f"line {lineno}: {exc}", line=lineno) from None
    if p is None:
        raise ManifestError("missing 'p = <prime>' line", line=0)
    Q = {k: v for k, v in Q.items() if v}
    if not Q:
        raise ManifestError("no terms", line=0)
    return SurfaceInput(p, Q), settings
