"""Command line entry point: ``fibzeta --manifest surface.txt [options]``."""

import argparse
import logging
import sys

from .errors import (AssumptionViolation, FibzetaError, InconsistentZeta, InsufficientPrecision,
                     LiftOutOfBounds, ManifestError, RerunRequired, VerificationFailed,
                     WeilDisambiguationFailed, WindowTooSmall)
from .pipeline import RunOptions, parse_manifest, parse_override, run
from .zeta import factor_over_Z, factored_display

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_MANIFEST = 2
EXIT_GATE = 3
EXIT_PRECISION = 4
EXIT_WEIL = 5
EXIT_VERIFY = 6


def build_parser():
    ap = argparse.ArgumentParser(prog="fibzeta",
                                 description="Zeta functions of surfaces Z^2 = Q(X, Gamma) over F_p.")
    ap.add_argument("--manifest", required=True, help="surface manifest file")
    ap.add_argument("--conjecture-finite-poles", action="store_true",
                    help="use the short window at infinity (results are conditional)")
    ap.add_argument("--verify", type=int, default=None, metavar="S_MAX",
                    help="check point counts over F_(p^s) for s <= S_MAX")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--dump-intermediates", metavar="DIR", default=None)
    ap.add_argument("--precision-override", default="", metavar="N3=..",
                    help="comma separated N3=, N1=, NG_inf= overrides")
    ap.add_argument("--relax-gate", action="store_true",
                    help="waive the soft gate conditions (exponent preparation, coprimality)")
    ap.add_argument("--report", metavar="PATH", default=None,
                    help="write the JSON report here ('-' for stdout)")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def render(report):
    z = report["zeta"]
    q = z["q"]
    lines = [f"p = {report['surface']['p']}  g = {report['surface']['g']}  h = {report['surface']['h']}",
             f"plan {report['plan']['bracket']}"]
    prov = report["provenance"]
    if prov["conditional_on_finite_poles_conjecture"]:
        lines.append("conditional on the finite-poles conjecture")
    if prov["waived_violations"]:
        lines.append("relaxed gate, waived: " + ", ".join(prov["waived_violations"]))
    parts = []
    for f, e in factor_over_Z(z["P2_compact"]):
        s = f"({factored_display(f, q)})"
        parts.append(s + (f"^{e}" if e > 1 else ""))
    lines.append("P2(Xbar, T) = " + " * ".join(parts))
    lines.append(f"w2 = {factored_display(z['w2'], q)}  eps = {z['eps']:+d}")
    lines.append(f"Z(Xbar, T) = 1 / ((1 - T) * P2(Xbar, T) * (1 - {q * q}T))")
    if "verification" in report:
        v = report["verification"]
        verdict = "PASS" if v["passed"] else f"FAIL at s = {v['first_mismatch']}"
        lines.append(f"verification s <= {v['s_max']}: {verdict} counts {v['observed']}")
    return "\n".join(lines)


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        with open(args.manifest, encoding="utf-8") as fh:
            surface, settings = parse_manifest(fh.read())
        override = dict(settings.get("precision_override", {}))
        override.update(parse_override(args.precision_override))
    except ManifestError as exc:
        print(f"manifest error: {exc}", file=sys.stderr)
        return EXIT_MANIFEST
    except (OSError, ValueError) as exc:
        print(f"manifest error: {exc}", file=sys.stderr)
        return EXIT_MANIFEST
    verify = args.verify if args.verify is not None else settings.get("verify", 0)
    opts = RunOptions(conjecture_finite_poles=args.conjecture_finite_poles
                      or settings.get("conjecture_finite_poles", False),
                      verify=verify, threads=args.threads, dump_dir=args.dump_intermediates,
                      precision_override=override, relax_gate=args.relax_gate)
    result = None
    try:
        result = run(surface, opts)
        code = EXIT_OK
    except AssumptionViolation as exc:
        for v in getattr(exc, "violations", [exc]):
            print(f"gate violation {v}", file=sys.stderr)
        return EXIT_GATE
    except (RerunRequired, InsufficientPrecision, LiftOutOfBounds, WindowTooSmall) as exc:
        extra = f" (suggested N3 = {exc.suggested_N3})" if isinstance(exc, RerunRequired) else ""
        print(f"precision: {exc}{extra}", file=sys.stderr)
        return EXIT_PRECISION
    except WeilDisambiguationFailed as exc:
        print(f"{exc}: survivors {exc.context.get('survivors')}", file=sys.stderr)
        return EXIT_WEIL
    except VerificationFailed as exc:
        print(f"{exc} at s = {exc.context.get('s')}: predicted {exc.context.get('predicted')} "
              f"observed {exc.context.get('observed')}", file=sys.stderr)
        return EXIT_VERIFY
    except InconsistentZeta as exc:
        print(f"{exc}", file=sys.stderr)
        return EXIT_VERIFY
    except FibzetaError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    print(render(result.report))
    if args.report:
        text = result.report_json()
        if args.report == "-":
            sys.stdout.write(text)
        else:
            with open(args.report, "w", encoding="utf-8") as fh:
                fh.write(text)
    if args.verbose:
        for k, v in result.timings.items():
            logging.info("time %s %.3fs", k, v)
    return code


if __name__ == "__main__":
    sys.exit(main())
