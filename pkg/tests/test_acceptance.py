"""Acceptance criteria, one test per criterion.

Each test prints a single ``criterion N [PASS|FAIL] ...`` line with the measured
numbers.  Tolerances are pinned at module level.  Run standalone with

    python3 tests/test_acceptance.py
"""

import math
import sys

import numpy as np
import pytest

from harmonic_zeros.asymptotics import endpoint_relative_error, upper_incomplete_gamma_integer, \
    log_upper_gamma_continued_fraction
from harmonic_zeros.ensembles import KINDS, ensemble_pair, make_profile
from harmonic_zeros.intensity import analytic_intensity, equal_degree_intensity, first_intensity
from harmonic_zeros.quadrature import expected_zeros
from harmonic_zeros.series import series_plan
from harmonic_zeros.zerofinder import monte_carlo_expectation

# pinned tolerances
ANALYTIC_REL_TOL = 1e-6
WEYL_EQUAL_TOL = 0.10
WEYL_PROPORTIONAL_TOL = 0.10
WEYL_FIXED_TOL = 0.05
KOSTLAN_TOL = 0.10
PLATEAU_TOL = 0.15
CORE_TOL = 0.20
OUTER_DENSITY_MAX = 0.01
ENDPOINT_ERR_MAX = 1e-4
ENDPOINT_SHRINK_MIN = 3.0
MC_SIGMAS = 3.0
MC_TRIALS = 200
MC_SEED = 2024
SWEEP_CASES = 1000
IDENTITY_REL_TOL = 1e-12
REDUCTION_REL_TOL = 1e-10
GAMMA_REL_TOL = 1e-10


# collected here and echoed in the pytest terminal summary (see conftest.py)
ACCEPTANCE_LINES = {}


def report(number, ok, text):
    line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {text}"
    ACCEPTANCE_LINES[number] = line
    print(line, flush=True)
    return ok


def plane(kind, n, m, rel_tol=1e-10):
    P, Q = ensemble_pair(kind, n, m)
    return expected_zeros(P, Q, n, m, rel_tol=rel_tol).value


def monotone_towards_one(ratios):
    dev = [abs(r - 1) for r in ratios]
    return all(a > b for a, b in zip(dev, dev[1:]))


# ---------------------------------------------------------------------------


def check_1():
    worst = (0.0, None)
    for kind in KINDS:
        for n in range(1, 51):
            err = abs(plane(kind, n, 0) / n - 1)
            if err > worst[0]:
                worst = (err, (kind, n))
    ok = worst[0] <= ANALYTIC_REL_TOL
    return report(1, ok, f"m=0 plane count = n for n=1..50, all ensembles: worst rel err {worst[0]:.2e} "
                         f"at {worst[1]} (tol {ANALYTIC_REL_TOL:g})")


def check_2():
    ns = (50, 100, 200, 400)
    ratios = [plane("weyl", n, n) / (n ** 1.5 / 3) for n in ns]
    within = abs(ratios[-1] - 1) <= WEYL_EQUAL_TOL
    trend = monotone_towards_one(ratios)
    shown = ", ".join(f"{n}:{r:.4f}" for n, r in zip(ns, ratios))
    return report(2, within and trend, f"weyl m=n, value/((1/3)n^1.5) [{shown}]; "
                                       f"within {WEYL_EQUAL_TOL:.0%} at 400: {within}; monotone: {trend}")


def check_3():
    ok = True
    parts = []
    for alpha in (0.25, 0.5):
        ns = (100, 200, 400)
        ratios = []
        for n in ns:
            m = int(round(alpha * n))
            ratios.append(plane("weyl", n, m) / (m ** 1.5 / 3))
        within = abs(ratios[-1] - 1) <= WEYL_PROPORTIONAL_TOL
        trend = monotone_towards_one(ratios)
        ok &= within and trend
        shown = ", ".join(f"{n}:{r:.4f}" for n, r in zip(ns, ratios))
        parts.append(f"alpha={alpha} [{shown}] within: {within} monotone: {trend}")
    return report(3, ok, "weyl m=alpha n, value/((1/3)m^1.5); " + "; ".join(parts))


def check_4():
    ns = (100, 200, 500)
    ratios = [plane("weyl", n, 2) / n for n in ns]
    ok = abs(ratios[-1] - 1) <= WEYL_FIXED_TOL
    shown = ", ".join(f"{n}:{r:.5f}" for n, r in zip(ns, ratios))
    return report(4, ok, f"weyl m=2, value/n [{shown}] (tol {WEYL_FIXED_TOL:.0%} at 500)")


def check_5():
    r = plane("kostlan", 200, 200) / 200 ** 1.5
    ok = abs(r / (math.pi / 4) - 1) <= KOSTLAN_TOL
    return report(5, ok, f"kostlan n=m=200, value/n^1.5 = {r:.5f} vs pi/4 = {math.pi / 4:.5f} "
                         f"(ratio {r / (math.pi / 4):.4f}, tol {KOSTLAN_TOL:.0%})")


def check_6():
    P, Q = ensemble_pair("weyl", 100, 25)

    def density(r):
        return first_intensity(P, Q, 100, 25, r * r) / math.pi

    radii = np.linspace(6.0, 9.0, 13)
    plateau = np.array([density(r) for r in radii])
    dev = np.abs(plateau * math.pi - 1)
    plateau_ok = bool(np.all(dev <= PLATEAU_TOL))
    core = density(3.0)
    core_ok = abs(core / (3.0 / (2 * math.pi)) - 1) <= CORE_TOL
    outer = density(12.0)
    outer_ok = outer < OUTER_DENSITY_MAX
    bad = ", ".join(f"r={r:.2f}:{d:.3f}" for r, d, e in zip(radii, plateau, dev) if e > PLATEAU_TOL)
    return report(6, plateau_ok and core_ok and outer_ok,
                  f"n=100 m=25 density: plateau r in [6,9] within {PLATEAU_TOL:.0%} of 1/pi: {plateau_ok}"
                  f"{' (off: ' + bad + ')' if bad else ''}; r=3 {core:.4f} vs {3 / (2 * math.pi):.4f}: {core_ok}; "
                  f"r=12 {outer:.5f} < {OUTER_DENSITY_MAX}: {outer_ok}")


def check_7():
    e100 = endpoint_relative_error("a", 0.5, 100, 1.0, 2)
    e200 = endpoint_relative_error("a", 0.5, 200, 1.0, 2)
    ok = e200 <= ENDPOINT_ERR_MAX and e100 / e200 >= ENDPOINT_SHRINK_MIN
    return report(7, ok, f"endpoint expansion kappa=0.5 t=1 order 2: err(100)={e100:.3e} err(200)={e200:.3e} "
                         f"shrink {e100 / e200:.2f}x (need <= {ENDPOINT_ERR_MAX:g} and >= {ENDPOINT_SHRINK_MIN}x)")


def check_8():
    ok = True
    parts = []
    for kind, n, m in (("weyl", 6, 3), ("kostlan", 4, 4)):
        est = monte_carlo_expectation(kind, kind, n, m, MC_TRIALS, MC_SEED)
        ref = plane(kind, n, m)
        close = abs(est.mean - ref) <= MC_SIGMAS * est.stderr
        bounds = all(n <= c <= n * n for c in est.counts)
        parity = m == n or all(c % 2 == n % 2 for c in est.counts)
        ok &= close and bounds and parity
        parts.append(f"{kind}({n},{m}) mean {est.mean:.3f} +- {est.stderr:.3f} vs {ref:.4f} "
                     f"z={(est.mean - ref) / est.stderr:+.2f} bounds: {bounds} parity: {parity}")
    return report(8, ok, f"Monte Carlo {MC_TRIALS} trials seed {MC_SEED}: " + "; ".join(parts))


def _sweep_cases(seed):
    rng = np.random.default_rng(seed)
    for _ in range(SWEEP_CASES):
        n = int(rng.integers(1, 51))
        m = int(rng.integers(0, n + 1))
        x = float(rng.uniform(1e-3, 100.0))
        yield n, m, x


def _logs(profile, k, x):
    return [float(v[0]) for v in series_plan(profile, k).log_sums(np.array([math.log(x)]))]


def check_9():
    failures = {}

    def fail(name):
        failures[name] = failures.get(name, 0) + 1

    for n, m, x in _sweep_cases(91):
        # Cauchy-Schwarz lemma
        if m >= 1:
            P, Q = ensemble_pair("weyl", n, m)
            an, bn, cn, _ = _logs(P, n, x)
            am, bm, cm, _ = _logs(Q, m, x)
            if np.logaddexp(an, am) + cn + cm < np.logaddexp(cn + 2 * bm, cm + 2 * bn) - 1e-12:
                fail("cauchy_schwarz")
        # Gram lemma a_k c_k - b_k^2 <= a_{k-1} b_k
        P = make_profile("weyl", n)
        _, lb, _, lg = _logs(P, n, x)
        if lg > _logs(P, n - 1, x)[0] + lb + 1e-12 * max(1.0, abs(lg)):
            fail("gram_lemma")
        # shift identities
        k = max(n, 2)
        Pk = make_profile("weyl", k)
        _, lb, lc, _ = _logs(Pk, k, x)
        a1 = math.exp(_logs(Pk, k - 1, x)[0] - lb)
        a2 = math.exp(_logs(Pk, k - 2, x)[0] - lc)
        if abs(x * a1 - 1) > IDENTITY_REL_TOL:
            fail("b_identity")
        if abs(x * x * a2 + x * a1 * math.exp(lb - lc) - 1) > IDENTITY_REL_TOL:
            fail("c_identity")

    rng = np.random.default_rng(92)
    for _ in range(SWEEP_CASES):
        k = int(rng.integers(1, 301))
        t = float(rng.choice([0.1, 1.0, 10.0, k / 2, 2.0 * k]))
        got = upper_incomplete_gamma_integer(k, t)
        if abs(math.expm1(got - log_upper_gamma_continued_fraction(k, t))) > GAMMA_REL_TOL:
            fail("incomplete_gamma")

    rng = np.random.default_rng(93)
    for _ in range(SWEEP_CASES):
        n = int(rng.integers(1, 201))
        x = float(np.exp(rng.uniform(math.log(1e-4), math.log(1e3))))
        P, Q = ensemble_pair("weyl", n, 0)
        full = first_intensity(P, Q, n, 0, x)
        if abs(full / float(analytic_intensity(P, Q, n, 0, x)[0]) - 1) > REDUCTION_REL_TOL:
            fail("m0_reduction")
        P, Q = ensemble_pair("weyl", n, n)
        full = first_intensity(P, Q, n, n, x)
        if abs(full / float(equal_degree_intensity(P, n, x)[0]) - 1) > REDUCTION_REL_TOL:
            fail("m_equals_n_reduction")

    names = ("cauchy_schwarz", "gram_lemma", "b_identity", "c_identity", "incomplete_gamma",
             "m0_reduction", "m_equals_n_reduction")
    shown = ", ".join(f"{name}:{failures.get(name, 0)}" for name in names)
    return report(9, not failures, f"property sweeps ({SWEEP_CASES} cases each), failures [{shown}]")


CHECKS = {1: check_1, 2: check_2, 3: check_3, 4: check_4, 5: check_5,
          6: check_6, 7: check_7, 8: check_8, 9: check_9}


@pytest.mark.parametrize("number", sorted(CHECKS))
def test_criterion(number):
    assert CHECKS[number](), f"criterion {number} failed; see the printed line"


if __name__ == "__main__":
    results = [CHECKS[k]() for k in sorted(CHECKS)]
    print(f"{sum(results)}/{len(results)} criteria pass")
    sys.exit(0 if all(results) else 1)
