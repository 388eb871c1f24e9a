"""Truncated weighted power sums and the Kac-Rice covariance combinations.

For a variance profile alpha and squared radius x = |z|^2 the three sums

    a_k = sum_{j=0..k} alpha_j x^j
    b_k = sum_{j=1..k} j alpha_j x^j
    c_k = sum_{j=1..k} j^2 alpha_j x^j

grow like e^x for the Weyl ensemble, so everything here is carried in log form.
The Gram-type combination a_k c_k - b_k^2 is expanded as its own power series
with nonnegative coefficients (Lagrange's identity), which removes the
cancellation that a direct subtraction suffers at large x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .ensembles import VarianceProfile

LOG_MANTISSA_BOUND = 64 * math.log(2.0)


@dataclass(frozen=True)
class SeriesPlan:
    """Log-coefficients of a_k, b_k, c_k and of a_k c_k - b_k^2 for one (profile, k)."""

    k: int
    log_a: np.ndarray
    log_b: np.ndarray
    log_c: np.ndarray
    log_gram: np.ndarray

    def log_sums(self, log_x):
        """log a, log b, log c, log(a c - b^2) at every log x (arrays)."""
        f = _kernels.log_power_sum
        return f(self.log_a, log_x), f(self.log_b, log_x), f(self.log_c, log_x), f(self.log_gram, log_x)


def series_plan(profile: VarianceProfile, k: int) -> SeriesPlan:
    k = int(k)
    if not 0 <= k <= profile.degree:
        raise ValueError(f"truncation index {k} outside 0..{profile.degree}")
    plan = profile._cache.get(k)
    if plan is None:
        la = profile.log_variances[: k + 1]
        j = np.arange(k + 1, dtype=np.float64)
        with np.errstate(divide="ignore"):
            lj = np.log(j)
        plan = SeriesPlan(k, la.copy(), la + lj, la + 2.0 * lj,
                          _kernels.lagrange_log_coefficients(la))
        profile._cache[k] = plan
    return plan


def _check_x(x):
    x = np.asarray(x, dtype=np.float64)
    if np.any(~np.isfinite(x)) or np.any(x < 0):
        raise ValueError("squared radius must be finite and >= 0")
    return x


@dataclass(frozen=True)
class ScaledSeries:
    """a_k, b_k, c_k at one x as mantissas times exp(log_scale)."""

    log_scale: float
    a: float
    b: float
    c: float
    k: int
    x: float

    def values(self):
        s = math.exp(self.log_scale)
        return self.a * s, self.b * s, self.c * s


def scaled_power_sums(profile: VarianceProfile, k: int, x: float) -> ScaledSeries:
    x = float(_check_x(x))
    plan = series_plan(profile, k)
    lx = math.log(x) if x > 0 else -math.inf
    la, lb, lc, _ = (float(v[0]) for v in plan.log_sums(np.array([lx])))
    # shared scale chosen so the a-mantissa sits in [1, k+1]
    scale = plan.log_a[0] if x == 0 else max(plan.log_a[j] + j * lx for j in range(k + 1))
    return ScaledSeries(scale, math.exp(la - scale), _mantissa(lb, scale), _mantissa(lc, scale), k, x)


def _mantissa(log_value, scale):
    return 0.0 if log_value == -math.inf else math.exp(log_value - scale)


# ---------------------------------------------------------------------------
# r-terms


@dataclass(frozen=True)
class LogRTerms:
    """Log forms of the Kac-Rice combinations, vectorized over x.

    ``log_gram_cross`` is log(r1 r2 - r12^2) and ``log_abs_delta``/``delta_sign``
    describe r1 - r2; together they give both quadratic forms of the integrand
    without subtracting large numbers.
    """

    log_r3: np.ndarray
    log_r1: np.ndarray
    log_r2: np.ndarray
    log_r12: np.ndarray
    log_gram_cross: np.ndarray
    log_abs_delta: np.ndarray
    delta_sign: np.ndarray


def _logadd(a, b):
    return np.logaddexp(a, b)


def log_r_terms(profile_p: VarianceProfile, profile_q: VarianceProfile | None,
                n: int, m: int, log_x) -> LogRTerms:
    """r3, r1, r2, r12 in log form.

    With ``profile_q=None`` the anti-analytic part is absent altogether (not even
    a constant term), which is the purely analytic model.
    """
    log_x = np.atleast_1d(np.asarray(log_x, dtype=np.float64))
    an, bn, cn, gn = series_plan(profile_p, n).log_sums(log_x)
    if profile_q is None:
        ninf = np.full_like(an, -np.inf)
        am = bm = cm = gm = ninf
    else:
        if m > n:
            raise ValueError("need m <= n")
        am, bm, cm, gm = series_plan(profile_q, m).log_sums(log_x)

    with np.errstate(invalid="ignore"):
        r3 = _logadd(an, am)
        # r1 = r3 c_n - b_n^2 = (a_n c_n - b_n^2) + a_m c_n
        r1 = _logadd(gn, am + cn)
        r2 = _logadd(gm, an + cm)
        r12 = bn + bm
        # r1 r2 - r12^2 = r3 (c_m G_n + c_n G_m)
        cross = r3 + _logadd(cm + gn, cn + gm)
        top = np.maximum(r1, r2)
        safe_top = np.where(np.isfinite(top), top, 0.0)
        diff = np.exp(r1 - safe_top) - np.exp(r2 - safe_top)
        diff = np.where(np.isfinite(top), diff, 0.0)
    with np.errstate(divide="ignore"):
        log_abs_delta = safe_top + np.log(np.abs(diff))
    return LogRTerms(r3, r1, r2, r12, cross, log_abs_delta, np.sign(diff))


@dataclass(frozen=True)
class RTerms:
    """r3 = mantissa * S, r1, r2, r12 = mantissa * S**2 with S = exp(log_scale)."""

    log_scale: float
    r1: float
    r2: float
    r3: float
    r12: float

    def values(self):
        s = math.exp(self.log_scale)
        return self.r1 * s * s, self.r2 * s * s, self.r3 * s, self.r12 * s * s


def r_terms(profile_p: VarianceProfile, profile_q: VarianceProfile | None,
            n: int, m: int, x: float) -> RTerms:
    x = float(_check_x(x))
    lx = math.log(x) if x > 0 else -math.inf
    t = log_r_terms(profile_p, profile_q, n, m, np.array([lx]))
    scale = float(t.log_r3[0])

    def mant(v, w):
        v = float(v[0])
        return 0.0 if v == -math.inf else math.exp(v - w * scale)

    return RTerms(scale, mant(t.log_r1, 2), mant(t.log_r2, 2), mant(t.log_r3, 1), mant(t.log_r12, 2))
