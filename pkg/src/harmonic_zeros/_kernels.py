"""Log-domain inner loops.

Every weighted power sum in the package is evaluated through
:func:`log_power_sum`, and every Lagrange-identity coefficient table through
:func:`lagrange_log_coefficients`.  Both have a numba implementation and a
pure-numpy implementation with identical semantics.  The numba path is used
when numba imports cleanly and ``HZ_DISABLE_NUMBA`` is unset (or ``0``).
"""

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    HAVE_NUMBA = False


def _env_disabled():
    return os.environ.get("HZ_DISABLE_NUMBA", "0").strip() not in ("", "0", "false", "False")


USE_NUMBA = HAVE_NUMBA and not _env_disabled()


# ---------------------------------------------------------------------------
# numpy reference path


def log_power_sum_numpy(log_coef, log_x):
    """log(sum_j exp(log_coef[j]) * x**j) for each entry of ``log_x``.

    ``log_coef`` may contain ``-inf`` (absent terms); ``log_x = -inf`` is x = 0.
    """
    log_coef = np.asarray(log_coef, dtype=np.float64)
    log_x = np.asarray(log_x, dtype=np.float64)
    j = np.arange(log_coef.size, dtype=np.float64)
    with np.errstate(invalid="ignore"):
        terms = log_coef[None, :] + j[None, :] * log_x[:, None]
    terms[:, 0] = log_coef[0]
    peak = terms.max(axis=1)
    out = np.full(log_x.shape, -np.inf)
    ok = np.isfinite(peak)
    if ok.any():
        shifted = np.exp(terms[ok] - peak[ok, None])
        out[ok] = peak[ok] + np.log(shifted.sum(axis=1))
    return out


def lagrange_log_coefficients_numpy(log_alpha):
    """Coefficients of a_k c_k - b_k**2 as a power series in x, in log form.

    gamma_s = sum_{i<j, i+j=s} alpha_i alpha_j (j-i)**2, s = 0..2k.  All terms
    are nonnegative, so the series carries no cancellation.
    """
    log_alpha = np.asarray(log_alpha, dtype=np.float64)
    k = log_alpha.size - 1
    out = np.full(2 * k + 1, -np.inf)
    if k < 1:
        return out
    idx = np.arange(k + 1)
    for s in range(1, 2 * k):
        i = idx[max(0, s - k):(s - 1) // 2 + 1]
        j = s - i
        keep = j <= k
        i, j = i[keep], j[keep]
        if i.size == 0:
            continue
        v = log_alpha[i] + log_alpha[j] + 2.0 * np.log((j - i).astype(np.float64))
        top = v.max()
        out[s] = top + np.log(np.exp(v - top).sum())
    return out


# ---------------------------------------------------------------------------
# numba path

if HAVE_NUMBA:

    @njit(cache=True, nogil=True)
    def log_power_sum_jit(log_coef, log_x):
        out = np.empty(log_x.size)
        nterm = log_coef.size
        for p in range(log_x.size):
            lx = log_x[p]
            peak = -np.inf
            for j in range(nterm):
                v = log_coef[0] if j == 0 else log_coef[j] + j * lx
                if v > peak:
                    peak = v
            if peak == -np.inf:
                out[p] = -np.inf
                continue
            acc = 0.0
            for j in range(nterm):
                v = log_coef[0] if j == 0 else log_coef[j] + j * lx
                if v > -np.inf:
                    acc += np.exp(v - peak)
            out[p] = peak + np.log(acc)
        return out

    @njit(cache=True, nogil=True)
    def lagrange_log_coefficients_jit(log_alpha):
        k = log_alpha.size - 1
        out = np.full(2 * k + 1, -np.inf)
        for s in range(1, 2 * k):
            lo = max(0, s - k)
            hi = (s - 1) // 2
            peak = -np.inf
            for i in range(lo, hi + 1):
                j = s - i
                v = log_alpha[i] + log_alpha[j] + 2.0 * np.log(j - i)
                if v > peak:
                    peak = v
            if peak == -np.inf:
                continue
            acc = 0.0
            for i in range(lo, hi + 1):
                j = s - i
                acc += np.exp(log_alpha[i] + log_alpha[j] + 2.0 * np.log(j - i) - peak)
            out[s] = peak + np.log(acc)
        return out

else:  # pragma: no cover
    log_power_sum_jit = log_power_sum_numpy
    lagrange_log_coefficients_jit = lagrange_log_coefficients_numpy


def log_power_sum(log_coef, log_x):
    log_coef = np.ascontiguousarray(log_coef, dtype=np.float64)
    log_x = np.ascontiguousarray(np.atleast_1d(log_x), dtype=np.float64)
    if USE_NUMBA:
        return log_power_sum_jit(log_coef, log_x)
    return log_power_sum_numpy(log_coef, log_x)


def lagrange_log_coefficients(log_alpha):
    log_alpha = np.ascontiguousarray(log_alpha, dtype=np.float64)
    if USE_NUMBA:
        return lagrange_log_coefficients_jit(log_alpha)
    return lagrange_log_coefficients_numpy(log_alpha)


def backend():
    return "numba" if USE_NUMBA else "numpy"
