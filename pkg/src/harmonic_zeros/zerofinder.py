"""Zeros of concrete harmonic polynomials and Monte Carlo estimates of E N.

Conjugating H(z) = 0 and writing w for conj(z) gives the polynomial system

    F(z, w) = p(z) + q(w) = 0,      G(z, w) = conj(q)(z) + conj(p)(w) = 0,

whose solutions with w = conj(z) are exactly the zeros of H.  The Sylvester
matrix of F and G in w is a matrix polynomial in z; its eigenvalues (through
a block-companion pencil) are the z-coordinates of all solutions, and the
eigenvectors carry w.  Candidates that pass the w = conj(z) filter are
polished by Newton's method on H itself.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .ensembles import HarmonicPolynomial, derive_seed, make_profile, normalize_kind, sample_coefficients

log = logging.getLogger(__name__)

MAX_DEGREE = 12


class ResampleBudgetExceeded(RuntimeError):
    """Too many Monte Carlo trials produced flagged (degenerate) instances."""


def evaluate(H: HarmonicPolynomial, z):
    """H(z), dH/dz = p'(z) and dH/dzbar = q'(conj z), vectorized over z."""
    z = np.asarray(z, dtype=np.complex128)
    zb = np.conj(z)
    a_desc = H.a[::-1]
    b_desc = H.b[::-1]
    value = np.polyval(a_desc, z) + np.polyval(b_desc, zb)
    dz = np.polyval(np.polyder(a_desc), z) if H.n >= 1 else np.zeros_like(z)
    dzb = np.polyval(np.polyder(b_desc), zb) if H.m >= 1 else np.zeros_like(z)
    return value, dz, dzb


def newton_step(H, z):
    """Newton correction for the real 2x2 system Re H = Im H = 0, in complex form."""
    h, pz, qz = evaluate(H, z)
    jac = np.abs(pz) ** 2 - np.abs(qz) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        step = (-h * np.conj(pz) + qz * np.conj(h)) / jac
    return step, h, jac


def root_radius_bound(H: HarmonicPolynomial) -> float:
    """Fujiwara-type radius containing every zero of H (m < n, or m = n with |a_n| != |b_n|)."""
    n = H.n
    lead = abs(H.a[-1])
    if H.m == n:
        lead = abs(abs(H.a[-1]) - abs(H.b[-1]))
    if lead == 0:
        return math.inf
    mags = np.abs(H.a[:n]).copy()
    mags[: min(H.m + 1, n)] += np.abs(H.b[: min(H.m + 1, n)])
    j = np.arange(n)
    return float(2.0 * np.max((mags / lead) ** (1.0 / (n - j)))) if n else 0.0


# ---------------------------------------------------------------------------
# elimination


def _sylvester_pencil(a, b):
    """Companion pencil (A, B) of the Sylvester matrix of F, G in w, as a polynomial in z."""
    n, m = a.size - 1, b.size - 1
    N = n + m
    C = np.zeros((n + 1, N, N), dtype=np.complex128)
    for i in range(n):  # F rows: coefficients of w^m .. w^1 are b_m .. b_1, w^0 carries p(z) + b_0
        for j in range(1, m + 1):
            C[0, i, i + m - j] = b[j]
        C[:, i, i + m] += a
        C[0, i, i + m] += b[0]
    ac, bc = np.conj(a), np.conj(b)
    for i in range(m):  # G rows: w^n .. w^1 carry conj(a_n) .. conj(a_1), w^0 carries conj(q)(z) + conj(a_0)
        r = n + i
        for j in range(1, n + 1):
            C[0, r, i + n - j] = ac[j]
        C[: m + 1, r, i + n] += bc
        C[0, r, i + n] += ac[0]
    d = n
    size = d * N
    A = np.zeros((size, size), dtype=np.complex128)
    B = np.eye(size, dtype=np.complex128)
    B[:N, :N] = C[d]
    for k in range(d):
        A[:N, k * N:(k + 1) * N] = -C[d - 1 - k]
    if d > 1:
        A[N:, : (d - 1) * N] = np.eye((d - 1) * N)
    return A, B, N


def elimination_candidates(H: HarmonicPolynomial):
    """(z, w) pairs solving F = G = 0, from the generalized eigenproblem."""
    A, B, N = _sylvester_pencil(H.a, H.b)
    w_h, vecs = scipy.linalg.eig(A, B, right=True, homogeneous_eigvals=True)
    alpha, beta = w_h
    finite = np.abs(beta) > 1e-13 * np.maximum(np.abs(alpha), 1.0)
    z = alpha[finite] / beta[finite]
    v = vecs[-N:, finite]
    # v is proportional to (w^{N-1}, ..., w, 1): least-squares ratio of neighbours
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.sum(v[:-1] * np.conj(v[1:]), axis=0) / np.sum(np.abs(v[1:]) ** 2, axis=0)
    return z, w


# ---------------------------------------------------------------------------
# zero sets


@dataclass
class ZeroFinderOptions:
    pair_tol: float = 1e-3
    strict_pair_tol: float = 1e-8
    dedup_tol: float = 1e-7
    residual_tol: float = 1e-9
    newton_iters: int = 60
    degenerate_tol: float = 1e-8


@dataclass
class ZeroSet:
    zeros: np.ndarray
    residuals: np.ndarray
    orientation: np.ndarray
    n: int
    m: int
    candidates: int = 0
    paired: int = 0
    polished: int = 0
    dropped: int = 0
    recovered: int = 0
    deduplicated: int = 0
    flags: list = field(default_factory=list)

    @property
    def count(self) -> int:
        return int(self.zeros.size)

    @property
    def flagged(self) -> bool:
        return bool(self.flags)

    @property
    def sense_reversing(self) -> int:
        return int(np.sum(self.orientation < 0))


def _polish(H, z0, opts):
    """Damped Newton from each start; returns (z, |H(z)|)."""
    z = np.array(z0, dtype=np.complex128)
    h = evaluate(H, z)[0]
    res = np.abs(h)
    done = np.zeros(z.shape, dtype=bool)
    for _ in range(opts.newton_iters):
        step, h, _ = newton_step(H, z)
        bad = ~np.isfinite(step)
        step[bad] = 0
        lam = np.ones(z.shape)
        trial = z + step
        tres = np.abs(evaluate(H, trial)[0])
        for _ in range(8):
            worse = (tres > res) & ~done & (np.abs(step) * lam > 0)
            if not worse.any():
                break
            lam[worse] *= 0.5
            trial[worse] = z[worse] + lam[worse] * step[worse]
            tres[worse] = np.abs(evaluate(H, trial[worse])[0])
        small = np.abs(lam * step) <= 4e-16 * (1.0 + np.abs(z))
        z = np.where(done, z, trial)
        res = np.where(done, res, tres)
        done |= small | bad
        if done.all():
            break
    return z, res


def _residual_limit(H, z, opts):
    # backward-error test; never looser than tol * max|coef| * (1 + |z|)^n
    r = np.abs(np.asarray(z))
    mag = np.polyval(np.abs(H.a[::-1]), r) + np.polyval(np.abs(H.b[::-1]), r)
    return 0.5 * opts.residual_tol * mag


def _dedup(z, tol):
    keep = []
    for c in z[np.argsort(np.abs(z), kind="stable")]:
        if all(abs(c - k) > tol * (1.0 + abs(c)) for k in keep):
            keep.append(c)
    return np.array(keep, dtype=np.complex128)


def _finish(H, z, opts, zs: ZeroSet):
    z = _dedup(z, opts.dedup_tol)
    zs.deduplicated = zs.polished - z.size
    h, pz, qz = evaluate(H, z)
    jac = np.abs(pz) ** 2 - np.abs(qz) ** 2
    zs.zeros = z
    zs.residuals = np.abs(h)
    zs.orientation = np.sign(jac).astype(int)
    if np.any(np.abs(jac) <= opts.degenerate_tol * (np.abs(pz) ** 2 + np.abs(qz) ** 2)):
        zs.flags.append("degenerate")
    n, m = H.n, H.m
    if m < n and zs.count != n + 2 * zs.sense_reversing:
        zs.flags.append("index_mismatch")
    if zs.count < (n if m < n else 1) or zs.count > n * n:
        zs.flags.append("count_out_of_bounds")
    return zs


def _rescaled(H, s):
    """H(s * zeta) as a harmonic polynomial in zeta (s real > 0), renormalized."""
    Hs = HarmonicPolynomial(H.a * s ** np.arange(H.n + 1), H.b * s ** np.arange(H.m + 1))
    return Hs.scaled(1.0 / np.max(np.abs(Hs.a)))


def _candidates(Hn, scales, opts):
    """Elimination candidates over several variable scales: (z, pair gap)."""
    zs_all, gaps = [], []
    for s in scales:
        Hs = _rescaled(Hn, s)
        if Hn.m == 0:
            poly = Hs.a.copy()
            poly[0] += Hs.b[0]
            z = np.roots(poly[::-1])
            gap = np.zeros(z.size)
        else:
            z, w = elimination_candidates(Hs)
            with np.errstate(invalid="ignore"):
                gap = np.abs(w - np.conj(z)) / (1.0 + np.abs(z))
        ok = np.isfinite(z)
        zs_all.append(z[ok] * s)
        gaps.append(np.where(np.isfinite(gap[ok]), gap[ok], np.inf))
    return np.concatenate(zs_all), np.concatenate(gaps)


def find_zeros(H: HarmonicPolynomial, opts: ZeroFinderOptions | None = None) -> ZeroSet:
    """All isolated zeros of H, via elimination plus Newton polishing.

    Candidates whose eigenvector satisfies w = conj(z) to ``pair_tol`` are the
    primary starts.  The remaining finite eigenvalues are polished as a
    recovery pass, since the pencil loses accuracy for zeros far from the
    balancing scale; anything that converges under the backward-error test is
    a zero of H, so the extra starts can only add true zeros.
    """
    opts = opts or ZeroFinderOptions()
    if H.n > MAX_DEGREE:
        raise ValueError(f"find_zeros supports n <= {MAX_DEGREE}")
    if H.a[-1] == 0:
        raise ValueError("leading coefficient a_n must be nonzero")
    if H.n == 0:
        raise ValueError("need n >= 1")
    # zeros are invariant under a global rescaling of H
    Hn = H.scaled(1.0 / np.max(np.abs(H.a)))
    n, m = Hn.n, Hn.m
    # z = s * zeta with s real keeps the harmonic structure
    s0 = (max(abs(Hn.a[0]), 1e-300) / abs(Hn.a[-1])) ** (1.0 / n)
    s0 = min(max(s0, 1e-3), 1e3)
    scales = [s0]
    bound = root_radius_bound(Hn)
    if m > 0 and math.isfinite(bound) and bound > 8.0 * s0:
        scales.append(min(0.5 * bound, 1e6))

    zs = ZeroSet(np.zeros(0, complex), np.zeros(0), np.zeros(0, int), n, m)
    cand, gap = _candidates(Hn, scales, opts)
    zs.candidates = cand.size
    primary = gap < opts.pair_tol
    zs.paired = int(primary.sum())
    if not primary.any():
        zs.flags.append("no_candidates")

    z, res = _polish(Hn, cand[primary], opts)
    good = np.isfinite(z) & (res <= _residual_limit(Hn, z, opts))
    zs.dropped = int((~good).sum())
    # loosely paired candidates are often spurious; only a tight pair that fails is suspicious
    if (~good & (gap[primary] < opts.strict_pair_tol)).any():
        zs.flags.append("polish_failed")
    found = _dedup(z[good], opts.dedup_tol)

    rest = cand[~primary]
    if math.isfinite(bound):
        rest = rest[np.abs(rest) <= 2.0 * bound]
    zr, rr = _polish(Hn, rest, opts)
    ok = np.isfinite(zr) & (rr <= _residual_limit(Hn, zr, opts))
    extra = [c for c in _dedup(zr[ok], opts.dedup_tol)
             if found.size == 0 or np.min(np.abs(found - c)) > opts.dedup_tol * (1.0 + abs(c))]
    zs.recovered = len(extra)
    if extra:
        log.debug("recovery pass added %d zeros", len(extra))
    zs.polished = found.size + len(extra)
    return _finish(Hn, np.concatenate([found, np.array(extra, dtype=np.complex128)]), opts, zs)


def newton_grid_zeros(H: HarmonicPolynomial, grid: int = 200, radius: float | None = None,
                      opts: ZeroFinderOptions | None = None) -> np.ndarray:
    """Zeros reached by Newton's method from a grid x grid lattice of starts.

    Independent of the elimination path; used as an oracle for small degrees.
    """
    opts = opts or ZeroFinderOptions()
    Hn = H.scaled(1.0 / np.max(np.abs(H.a)))
    R = root_radius_bound(Hn) if radius is None else float(radius)
    if not math.isfinite(R):
        raise ValueError("no finite root bound for this instance")
    axis = np.linspace(-R, R, int(grid))
    z = (axis[None, :] + 1j * axis[:, None]).ravel()
    for _ in range(80):
        step, _, _ = newton_step(Hn, z)
        step = np.where(np.isfinite(step), step, 0)
        # cap wild steps from near-singular Jacobians
        big = np.abs(step) > R
        step[big] *= R / np.abs(step[big])
        z = z + step
    step, h, _ = newton_step(Hn, z)
    ok = np.isfinite(z) & (np.abs(h) <= _residual_limit(Hn, z, opts)) & (np.abs(step) < 1e-10 * (1 + np.abs(z)))
    z, _ = _polish(Hn, z[ok], opts)
    z = np.round(z, 9)
    return _dedup(np.unique(z), opts.dedup_tol * 10)


# ---------------------------------------------------------------------------
# Monte Carlo


@dataclass
class MonteCarloEstimate:
    mean: float
    stderr: float
    trials: int
    histogram: dict
    seed: int
    resampled: int = 0
    counts: list = field(default_factory=list, repr=False)

    def as_dict(self):
        return {
            "mean": self.mean,
            "stderr": self.stderr,
            "trials": self.trials,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "seed": self.seed,
            "resampled": self.resampled,
        }


def worker_count(requested: int | None = None) -> int:
    if requested is None:
        try:
            requested = int(os.environ.get("HZ_THREADS", "0"))
        except ValueError:
            requested = 0
    if requested <= 0:
        return os.cpu_count() or 1
    return requested


def _profiles_for(kind_p, kind_q, n, m):
    kind_p, kind_q = normalize_kind(kind_p), normalize_kind(kind_q)
    P = make_profile(kind_p, n)
    Q = make_profile(kind_q, m, ambient=n) if kind_q == "truncated_kostlan" else make_profile(kind_q, m)
    return P, Q


def _one_trial(P, Q, seed, index, max_attempts, opts):
    attempt = 0
    while True:
        H = sample_coefficients(P, Q, derive_seed(seed, index, attempt))
        zs = find_zeros(H, opts)
        if not zs.flagged:
            return zs.count, attempt
        attempt += 1
        if attempt >= max_attempts:
            return None, attempt


def monte_carlo_expectation(kind_p: str, kind_q: str, n: int, m: int, trials: int, seed: int,
                            opts: ZeroFinderOptions | None = None,
                            workers: int | None = None) -> MonteCarloEstimate:
    """Sample mean of the zero count over independent draws.

    Trial i uses seeds derived from (seed, i, attempt); flagged instances are
    redrawn with the next attempt index, so results do not depend on scheduling.
    """
    if n > 10:
        raise ValueError("Monte Carlo zero counting supports n <= 10")
    if trials < 1:
        raise ValueError("need trials >= 1")
    if not 0 <= m <= n:
        raise ValueError("need 0 <= m <= n")
    P, Q = _profiles_for(kind_p, kind_q, n, m)
    budget = max(1, int(0.05 * trials))

    def run(i):
        return _one_trial(P, Q, seed, i, budget + 1, opts)

    nw = min(worker_count(workers), trials)
    if nw > 1:
        with ThreadPoolExecutor(max_workers=nw) as pool:
            results = list(pool.map(run, range(trials)))
    else:
        results = [run(i) for i in range(trials)]

    resampled = sum(r[1] for r in results)
    if resampled > budget or any(r[0] is None for r in results):
        raise ResampleBudgetExceeded(f"{resampled} of {trials} trials needed resampling (budget {budget})")
    counts = [r[0] for r in results]
    arr = np.array(counts, dtype=np.float64)
    mean = float(arr.mean())
    stderr = float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else 0.0
    hist = {}
    for c in counts:
        hist[c] = hist.get(c, 0) + 1
    return MonteCarloEstimate(mean, stderr, trials, hist, int(seed), resampled, counts)
