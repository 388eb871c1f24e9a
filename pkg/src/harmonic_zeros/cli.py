"""Command-line front end: JSON reports and CSV tables.

Exit codes: 0 success, 2 usage, 3 numeric non-convergence (or Monte Carlo
resample budget exhausted), 4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

from . import __version__
from .asymptotics import predict_expected_zeros
from .ensembles import KINDS, ensemble_pair, normalize_kind
from .intensity import density_grid, difference_grid, radial_profile
from .quadrature import Region, expected_zeros
from .zerofinder import ResampleBudgetExceeded, monte_carlo_expectation

SCHEMA_VERSION = "1.0"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

ENSEMBLE_CHOICES = [k.replace("_", "-") for k in KINDS]


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return v


def _positive_float(text):
    v = float(text)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _int_list(text):
    try:
        vals = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals or any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError("n-list needs positive integers")
    return vals


def _region(text):
    try:
        return Region.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_ensemble(p):
    p.add_argument("--ensemble", required=True, choices=ENSEMBLE_CHOICES + list(KINDS),
                   metavar="{" + "|".join(ENSEMBLE_CHOICES) + "}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="harmonic-zeros",
        description="Expected zeros of random Gaussian harmonic polynomials p(z) + q(conj z).")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expect", help="expected zero count in a radial region (JSON)")
    _add_ensemble(p)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--m", type=_nonneg_int, required=True)
    p.add_argument("--region", type=_region, default=Region("plane"),
                   help="plane, disc:R or annulus:R1,R2 (default plane)")
    p.add_argument("--rel-tol", type=float, default=1e-8)
    p.add_argument("--out", help="write the JSON report here instead of stdout")

    p = sub.add_parser("intensity", help="density tables (CSV)")
    _add_ensemble(p)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--m", type=_nonneg_int, required=True)
    p.add_argument("--grid", type=_positive_int, help="lattice points per axis")
    p.add_argument("--extent", type=_positive_float, help="half-width of the square grid")
    p.add_argument("--radial-points", type=_positive_int)
    p.add_argument("--r-max", type=_positive_float)
    p.add_argument("--subtract-analytic", action="store_true",
                   help="emit I_{n,m} - I_{n,0} instead of I_{n,m}")
    p.add_argument("--grid-out", help="grid CSV path (stdout if omitted)")
    p.add_argument("--radial-out", help="radial CSV path (stdout if omitted)")

    p = sub.add_parser("sweep", help="convergence table against the large-n prediction (CSV)")
    _add_ensemble(p)
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--alpha", type=float, help="m = round(alpha n), 0 < alpha <= 1")
    grp.add_argument("--m-fixed", type=_nonneg_int)
    p.add_argument("--n-list", type=_int_list, required=True)
    p.add_argument("--mode", choices=("theorem", "conjecture"), default="theorem")
    p.add_argument("--rel-tol", type=float, default=1e-8)
    p.add_argument("--out", help="CSV path (stdout if omitted)")

    p = sub.add_parser("montecarlo", help="Monte Carlo zero counts vs the quadrature value (JSON)")
    _add_ensemble(p)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--m", type=_nonneg_int, required=True)
    p.add_argument("--trials", type=_positive_int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None, help="worker cap (default HZ_THREADS, 0 = auto)")
    p.add_argument("--out", help="write the JSON report here instead of stdout")

    p = sub.add_parser("predict", help="leading-order large-n prediction (JSON)")
    _add_ensemble(p)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--m", type=_nonneg_int, required=True)
    p.add_argument("--mode", choices=("theorem", "conjecture"), default="theorem")
    p.add_argument("--regime", choices=("m_fixed", "m_proportional", "m_equals_n"))
    p.add_argument("--out")
    return parser


# ---------------------------------------------------------------------------
# output helpers


def _write_text(text, path, stdout):
    if path is None or path == "-":
        stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror or exc}", EXIT_IO) from None


def _report(command, argv, kind, n, m, results, seed, started):
    return {
        "schema_version": SCHEMA_VERSION,
        "artifact_version": __version__,
        "command": command,
        "argv": list(argv),
        "ensemble": {"kind": kind, "n": n, "m": m},
        "seed": seed,
        "results": results,
        "timing": {"wall_seconds": time.perf_counter() - started},
    }


def _dump(report):
    return json.dumps(report, indent=2, sort_keys=False, allow_nan=False) + "\n"


def _check_degrees(n, m):
    if m > n:
        raise CliError(f"need m <= n (got n={n}, m={m})", EXIT_USAGE)


def _quadrature(kind, n, m, region, rel_tol):
    try:
        P, Q = ensemble_pair(kind, n, m)
        res = expected_zeros(P, Q, n, m, region, rel_tol=rel_tol)
    except (ValueError, OverflowError) as exc:
        raise CliError(str(exc), EXIT_USAGE) from None
    if not res.converged:
        raise CliError(f"quadrature did not converge (estimate {res.value!r} +- {res.abs_error_estimate!r})",
                       EXIT_NUMERIC)
    return res


# ---------------------------------------------------------------------------
# commands


def cmd_expect(args, argv, stdout):
    started = time.perf_counter()
    kind = normalize_kind(args.ensemble)
    _check_degrees(args.n, args.m)
    res = _quadrature(kind, args.n, args.m, args.region, args.rel_tol)
    results = res.as_dict()
    results["region"] = str(args.region)
    results["rel_tol"] = args.rel_tol
    _write_text(_dump(_report("expect", argv, kind, args.n, args.m, results, None, started)), args.out, stdout)


def cmd_intensity(args, argv, stdout):
    kind = normalize_kind(args.ensemble)
    _check_degrees(args.n, args.m)
    want_grid = args.grid is not None or args.extent is not None
    want_radial = args.radial_points is not None or args.r_max is not None
    if not want_grid and not want_radial:
        raise CliError("give --grid/--extent and/or --radial-points/--r-max", EXIT_USAGE)
    if want_grid and (args.grid is None or args.extent is None):
        raise CliError("--grid and --extent go together", EXIT_USAGE)
    if want_radial and (args.radial_points is None or args.r_max is None):
        raise CliError("--radial-points and --r-max go together", EXIT_USAGE)
    if args.subtract_analytic and args.m == 0:
        raise CliError("--subtract-analytic needs m >= 1", EXIT_USAGE)
    try:
        P, Q = ensemble_pair(kind, args.n, args.m)
    except (ValueError, OverflowError) as exc:
        raise CliError(str(exc), EXIT_USAGE) from None

    if want_grid:
        if args.subtract_analytic:
            grid = difference_grid(P, Q, args.n, args.m, args.extent, args.grid)
        else:
            grid = density_grid(P, Q, args.n, args.m, args.extent, args.grid)
        _write_text(grid.to_csv(), args.grid_out, stdout)
    if want_radial:
        prof = radial_profile(P, Q, args.n, args.m, args.r_max, args.radial_points)
        if args.subtract_analytic:
            base = radial_profile(P, Q.truncated(0), args.n, 0, args.r_max, args.radial_points)
            prof.intensity = prof.intensity - base.intensity
        _write_text(prof.to_csv(), args.radial_out, stdout)


def cmd_sweep(args, argv, stdout):
    kind = normalize_kind(args.ensemble)
    if args.alpha is not None and not 0 < args.alpha <= 1:
        raise CliError("--alpha must lie in (0, 1]", EXIT_USAGE)
    rows = ["n,m,value,abs_error_estimate,prediction,ratio"]
    for n in args.n_list:
        if args.alpha is not None:
            m = int(round(args.alpha * n))
            regime = "m_equals_n" if m == n else "m_proportional"
        else:
            m = args.m_fixed
            regime = "m_equals_n" if m == n else "m_fixed"
        _check_degrees(n, m)
        try:
            pred = predict_expected_zeros(kind, n, m, args.mode, regime).value
        except ValueError as exc:
            raise CliError(str(exc), EXIT_USAGE) from None
        res = _quadrature(kind, n, m, Region("plane"), args.rel_tol)
        rows.append(",".join([str(n), str(m), repr(res.value), repr(res.abs_error_estimate),
                              repr(pred), repr(res.value / pred)]))
    _write_text("\n".join(rows) + "\n", args.out, stdout)


def monte_carlo_kinds(kind):
    """(p ensemble, q ensemble) names used for sampling a named harmonic ensemble."""
    kind = normalize_kind(kind)
    if kind.startswith("truncated"):
        return "kostlan", kind
    return kind, kind


def cmd_montecarlo(args, argv, stdout):
    started = time.perf_counter()
    kind = normalize_kind(args.ensemble)
    _check_degrees(args.n, args.m)
    if args.n > 10:
        raise CliError("Monte Carlo zero counting supports n <= 10", EXIT_USAGE)
    kp, kq = monte_carlo_kinds(kind)
    try:
        est = monte_carlo_expectation(kp, kq, args.n, args.m, args.trials, args.seed, workers=args.threads)
    except ResampleBudgetExceeded as exc:
        raise CliError(str(exc), EXIT_NUMERIC) from None
    ref = _quadrature(kind, args.n, args.m, Region("plane"), 1e-10)
    diff = est.mean - ref.value
    if est.stderr > 0:
        z = diff / est.stderr
    else:
        # zero spread: only an exact match is consistent
        z = 0.0 if abs(diff) <= 1e-6 * max(1.0, ref.value) else math.copysign(math.inf, diff)
    results = est.as_dict()
    results["quadrature_reference"] = ref.value
    results["quadrature_abs_error_estimate"] = ref.abs_error_estimate
    results["z_score"] = z if math.isfinite(z) else None
    results["consistent"] = bool(math.isfinite(z) and abs(z) <= 3.0)
    _write_text(_dump(_report("montecarlo", argv, kind, args.n, args.m, results, args.seed, started)),
                args.out, stdout)


def cmd_predict(args, argv, stdout):
    started = time.perf_counter()
    kind = normalize_kind(args.ensemble)
    _check_degrees(args.n, args.m)
    try:
        pred = predict_expected_zeros(kind, args.n, args.m, args.mode, args.regime)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None
    results = {"prediction": pred.value, "regime": pred.regime, "formula_id": pred.formula_id,
               "mode": args.mode}
    _write_text(_dump(_report("predict", argv, kind, args.n, args.m, results, None, started)), args.out, stdout)


COMMANDS = {
    "expect": cmd_expect,
    "intensity": cmd_intensity,
    "sweep": cmd_sweep,
    "montecarlo": cmd_montecarlo,
    "predict": cmd_predict,
}


def main(argv=None, stdout=None, stderr=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags and 0 on --help/--version
        return int(exc.code or 0)
    try:
        COMMANDS[args.command](args, argv, stdout)
    except CliError as exc:
        print(f"harmonic-zeros: error: {exc}", file=stderr)
        return exc.code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
