"""Compare the numba and numpy kernels, and time one end-to-end quadrature per backend.

    python3 benchmarks/bench_kernels.py [--degrees 50,200,1000] [--points 2000] [--repeat 5]

The end-to-end timings run each backend in a subprocess with HZ_DISABLE_NUMBA
set accordingly, since the flag is read at import time.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from harmonic_zeros import _kernels
from harmonic_zeros.ensembles import make_profile

END_TO_END = (
    "import time;"
    "from harmonic_zeros.ensembles import ensemble_pair;"
    "from harmonic_zeros.quadrature import expected_zeros;"
    "from harmonic_zeros._kernels import backend;"
    "P, Q = ensemble_pair('weyl', {n}, {m});"
    "expected_zeros(P, Q, 10, 5);"  # warm-up / jit compile
    "t = time.perf_counter();"
    "v = expected_zeros(P, Q, {n}, {m}).value;"
    "print(backend(), v, time.perf_counter() - t)"
)


def best_of(fn, repeat):
    fn()  # warm-up (jit compile)
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--degrees", default="50,200,1000")
    ap.add_argument("--points", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--end-to-end", default="400,200", help="n,m for the quadrature timing ('' to skip)")
    args = ap.parse_args(argv)

    if not _kernels.HAVE_NUMBA:
        print("numba not importable; nothing to compare")
        return 1
    log_x = np.log(np.linspace(1e-3, 3000.0, args.points))
    print(f"{'kernel':<22}{'degree':>8}{'numpy [ms]':>14}{'numba [ms]':>14}{'speedup':>10}{'max |diff|':>14}")
    for k in (int(s) for s in args.degrees.split(",")):
        la = make_profile("weyl", k).log_variances
        cases = [
            ("log_power_sum", _kernels.log_power_sum_numpy, _kernels.log_power_sum_jit, (la, log_x)),
            ("lagrange_coefficients", _kernels.lagrange_log_coefficients_numpy,
             _kernels.lagrange_log_coefficients_jit, (la,)),
        ]
        for name, f_np, f_jit, a in cases:
            t_np = best_of(lambda: f_np(*a), args.repeat)
            t_jit = best_of(lambda: f_jit(*a), args.repeat)
            r_np, r_jit = f_np(*a), f_jit(*a)
            fin = np.isfinite(r_np)
            diff = float(np.max(np.abs(r_np[fin] - r_jit[fin]))) if fin.any() else 0.0
            print(f"{name:<22}{k:>8}{1e3 * t_np:>14.3f}{1e3 * t_jit:>14.3f}{t_np / t_jit:>10.1f}{diff:>14.2e}")

    if args.end_to_end:
        n, m = (int(s) for s in args.end_to_end.split(","))
        print(f"\nexpected_zeros weyl n={n} m={m}")
        for flag in ("1", "0"):
            env = dict(os.environ, HZ_DISABLE_NUMBA=flag)
            out = subprocess.run([sys.executable, "-c", END_TO_END.format(n=n, m=m)],
                                 env=env, capture_output=True, text=True, check=True)
            be, value, secs = out.stdout.split()
            print(f"  {be:<6} value={float(value):.10f}  {1e3 * float(secs):.1f} ms")
    return 0


if __name__ == "__main__":
    sys.exit(main())
