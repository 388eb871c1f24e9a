import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from harmonic_zeros.ensembles import HarmonicPolynomial, ensemble_pair, sample_coefficients
from harmonic_zeros.zerofinder import (
    ResampleBudgetExceeded, ZeroFinderOptions, elimination_candidates, evaluate, find_zeros,
    monte_carlo_expectation, newton_grid_zeros, root_radius_bound, worker_count,
)


def H_of(a, b):
    return HarmonicPolynomial(np.array(a, dtype=complex), np.array(b, dtype=complex))


def test_evaluate_z_squared():
    v, dz, dzb = evaluate(H_of([0, 0, 1], [0]), 1 + 1j)
    assert v == pytest.approx(2j)
    assert dz == pytest.approx(2 + 2j)
    assert dzb == 0


def test_evaluate_linear_wirtinger():
    eps = 0.3
    _, dz, dzb = evaluate(H_of([0, eps], [0, 1]), 0.7 - 0.2j)
    assert dz == pytest.approx(eps) and dzb == pytest.approx(1.0)


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_wirtinger_pair_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 8))
    m = int(rng.integers(0, n + 1))
    H = H_of(rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1), rng.normal(size=m + 1) + 1j * rng.normal(size=m + 1))
    z = complex(rng.normal(), rng.normal())
    h = 1e-6
    fx = (evaluate(H, z + h)[0] - evaluate(H, z - h)[0]) / (2 * h)
    fy = (evaluate(H, z + 1j * h)[0] - evaluate(H, z - 1j * h)[0]) / (2 * h)
    _, dz, dzb = evaluate(H, z)
    assert dz == pytest.approx(0.5 * (fx - 1j * fy), rel=1e-6, abs=1e-6)
    assert dzb == pytest.approx(0.5 * (fx + 1j * fy), rel=1e-6, abs=1e-6)


def test_cube_roots_of_unity():
    zs = find_zeros(H_of([-1, 0, 0, 1], [0]))
    assert zs.count == 3 and not zs.flagged
    want = np.exp(2j * np.pi * np.arange(3) / 3)
    for w in want:
        assert np.min(np.abs(zs.zeros - w)) < 1e-12


def test_linear_harmonic_single_zero():
    zs = find_zeros(H_of([0, 1], [0, 0.5]))
    assert zs.count == 1
    assert abs(zs.zeros[0]) < 1e-14
    assert zs.orientation[0] == 1


def test_sense_reversing_zero():
    # z^2 + 3 conj(z): the origin plus three zeros on |z| = 3
    zs = find_zeros(H_of([0, 0, 1], [0, 3]))
    assert zs.count == 2 + 2 * zs.sense_reversing
    for z in zs.zeros:
        assert abs(z * z + 3 * np.conj(z)) < 1e-10
    assert zs.count == 4 and zs.sense_reversing == 1
    assert np.sum(np.isclose(np.abs(zs.zeros), 3.0)) == 3


def test_analytic_case_matches_numpy_roots():
    rng = np.random.default_rng(5)
    for _ in range(30):
        n = int(rng.integers(1, 11))
        a = rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1)
        b0 = complex(rng.normal(), rng.normal())
        zs = find_zeros(H_of(a, [b0]))
        coeffs = a.copy()
        coeffs[0] += b0
        ref = np.roots(coeffs[::-1])
        assert zs.count == n
        for r in ref:
            assert np.min(np.abs(zs.zeros - r)) < 1e-8 * (1 + abs(r))


def test_elimination_recovers_known_solution():
    H = H_of([1, -2, 0.5], [0.3, 0.1j])
    z, w = elimination_candidates(H)
    zs = find_zeros(H)
    for zero in zs.zeros:
        k = np.argmin(np.abs(z - zero))
        assert abs(z[k] - zero) < 1e-6 * (1 + abs(zero))
        assert abs(w[k] - np.conj(zero)) < 1e-4 * (1 + abs(zero))


@pytest.mark.parametrize("seed", range(50))
def test_against_grid_newton_oracle(seed):
    rng = np.random.default_rng(1000 + seed)
    kind = ("weyl", "kostlan", "naive")[seed % 3]
    n = int(rng.integers(2, 6))
    m = int(rng.integers(1, n + 1))
    P, Q = ensemble_pair(kind, n, m)
    H = sample_coefficients(P, Q, seed)
    zs = find_zeros(H)
    oracle = newton_grid_zeros(H, grid=200)
    if zs.flagged:
        pytest.skip(f"instance flagged: {zs.flags}")
    assert zs.count == oracle.size, (kind, n, m)
    for z in oracle:
        assert np.min(np.abs(zs.zeros - z)) < 1e-6 * (1 + abs(z))


def test_weyl_5_3_seed7_count_and_parity():
    P, Q = ensemble_pair("weyl", 5, 3)
    H = sample_coefficients(P, Q, 7)
    zs = find_zeros(H)
    assert 5 <= zs.count <= 25 and zs.count % 2 == 1
    assert zs.count == 5 + 2 * zs.sense_reversing
    assert zs.count == newton_grid_zeros(H, grid=200).size


@pytest.mark.parametrize("kind,n,m", [("weyl", 8, 4), ("kostlan", 10, 6), ("naive", 9, 2), ("weyl", 12, 12)])
def test_invariants_on_random_instances(kind, n, m):
    P, Q = ensemble_pair(kind, n, m)
    for seed in range(10):
        H = sample_coefficients(P, Q, seed)
        zs = find_zeros(H)
        if zs.flagged:
            continue
        assert n <= zs.count <= n * n or m == n
        assert zs.count <= n * n
        if m < n:
            assert zs.count % 2 == n % 2
            assert zs.count == n + 2 * zs.sense_reversing
        val, _, _ = evaluate(H.scaled(1 / np.max(np.abs(H.a))), zs.zeros)
        scale = 1 + np.abs(zs.zeros) ** n
        assert np.all(np.abs(val) <= 1e-8 * scale)
        d = np.abs(zs.zeros[:, None] - zs.zeros[None, :]) + np.eye(zs.count)
        assert np.all(d > 1e-7)


def test_zero_set_scale_invariance():
    P, Q = ensemble_pair("weyl", 6, 3)
    H = sample_coefficients(P, Q, 3)
    a = np.sort_complex(find_zeros(H).zeros)
    b = np.sort_complex(find_zeros(H.scaled(1e6 - 2e5j)).zeros)
    np.testing.assert_allclose(a, b, rtol=1e-9, atol=1e-12)


def test_degree_cap():
    with pytest.raises(ValueError):
        find_zeros(H_of(np.ones(14), [1]))


def test_root_radius_bound_contains_zeros():
    rng = np.random.default_rng(8)
    for _ in range(20):
        n = int(rng.integers(1, 9))
        m = int(rng.integers(0, n))
        H = H_of(rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1),
                 rng.normal(size=m + 1) + 1j * rng.normal(size=m + 1))
        R = root_radius_bound(H)
        assert np.all(np.abs(find_zeros(H).zeros) <= R)


# ---------------------------------------------------------------------------
# Monte Carlo


def test_monte_carlo_analytic_case_exact():
    est = monte_carlo_expectation("weyl", "weyl", 4, 0, 50, seed=1)
    assert est.mean == 4.0 and est.stderr == 0.0
    assert est.histogram == {4: 50}


def test_monte_carlo_deterministic_across_workers():
    a = monte_carlo_expectation("weyl", "weyl", 5, 2, 24, seed=9, workers=1)
    b = monte_carlo_expectation("weyl", "weyl", 5, 2, 24, seed=9, workers=4)
    assert a.counts == b.counts and a.as_dict() == b.as_dict()


def test_monte_carlo_pathwise_invariants():
    est = monte_carlo_expectation("kostlan", "kostlan", 5, 3, 40, seed=2)
    for c in est.counts:
        assert 5 <= c <= 25 and c % 2 == 1


def test_monte_carlo_validation():
    with pytest.raises(ValueError):
        monte_carlo_expectation("weyl", "weyl", 11, 2, 5, seed=0)
    with pytest.raises(ValueError):
        monte_carlo_expectation("weyl", "weyl", 5, 2, 0, seed=0)


def test_resample_budget_enforced():
    # an impossible residual tolerance flags every instance
    opts = ZeroFinderOptions(residual_tol=1e-300, newton_iters=1)
    with pytest.raises(ResampleBudgetExceeded):
        monte_carlo_expectation("weyl", "weyl", 4, 2, 20, seed=0, opts=opts, workers=1)


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("HZ_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("HZ_THREADS", "0")
    assert worker_count() >= 1
    assert worker_count(2) == 2
