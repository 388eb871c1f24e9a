"""Closed-form large-n predictions and the Laplace-method pieces behind them.

The truncated exponential sums of the Weyl ensemble are tied to the upper
incomplete gamma function,

    sum_{j<k} t^j / j! = e^t Gamma(k, t) / (k-1)!,

so a_K(n t) / e^{n t} -> 1 when K / n -> kappa > t (interior maximum), while for
t > kappa the maximum sits at the endpoint and Watson's lemma gives

    a_K(n t) = (n t)^K / K! * (A0 + A1/n + A2/n^2 + O(n^-3)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import gammaln

from .ensembles import make_profile, normalize_kind
from .series import scaled_power_sums

POLE_GUARD = 1e-3


# ---------------------------------------------------------------------------
# incomplete gamma


def upper_incomplete_gamma_integer(k: int, t: float) -> float:
    """log Gamma(k, t) for integer k >= 1 via the finite exponential sum."""
    k = int(k)
    if k < 1 or not t > 0:
        raise ValueError("need integer k >= 1 and t > 0")
    s = scaled_power_sums(make_profile("weyl", k - 1), k - 1, t)
    return math.lgamma(k) - t + s.log_scale + math.log(s.a)


def log_upper_gamma_continued_fraction(s: float, t: float, tol: float = 1e-16, max_iter: int = 10_000) -> float:
    """log Gamma(s, t) by the Legendre continued fraction (modified Lentz).

    Converges quickly for t > s + 1; below that the lower series is used and
    subtracted from Gamma(s).
    """
    if not (s > 0 and t > 0):
        raise ValueError("need s > 0 and t > 0")
    if t < s + 1.0:
        # lower series: gamma(s, t) = t^s e^-t sum t^j / (s (s+1) ... (s+j))
        term = 1.0 / s
        total = term
        j = 0
        while abs(term) > tol * abs(total):
            j += 1
            term *= t / (s + j)
            total += term
            if j > max_iter:
                raise RuntimeError("incomplete gamma series did not converge")
        log_lower = s * math.log(t) - t + math.log(total)
        log_full = math.lgamma(s)
        ratio = math.exp(log_lower - log_full)
        return log_full + math.log1p(-ratio)
    tiny = 1e-300
    b = t + 1.0 - s
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, max_iter):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < tol:
            return s * math.log(t) - t + math.log(h)
    raise RuntimeError("incomplete gamma continued fraction did not converge")


# ---------------------------------------------------------------------------
# interior regime


def interior_limit_check(alpha: float, k_offset: int, n: int, t: float) -> float:
    """a_{alpha n - k}(n t) / e^{n t} for t < alpha, which tends to 1 as n grows."""
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    if not 0 < t < alpha:
        raise ValueError("interior regime needs 0 < t < alpha")
    K = int(round(alpha * n)) - int(k_offset)
    if K < 1:
        raise ValueError("alpha n - k must be a positive integer")
    x = n * t
    s = scaled_power_sums(make_profile("weyl", K), K, x)
    return math.exp(s.log_scale + math.log(s.a) - x)


# ---------------------------------------------------------------------------
# endpoint regime


@dataclass(frozen=True)
class LaplaceEndpointExpansion:
    """Watson-lemma data for a_K(n t) with K = kappa n, t > kappa.

    y1, y2, y3 are the first three derivatives at s = 0 of the inverse of
    g(t + y) - g(t) = -s with g(y) = kappa log y - y.  ``y3_alternate`` is an
    alternative closed form that drops a factor kappa in its first term and
    only agrees with y3 at kappa = 1.
    """

    kappa: float
    t: float
    order: int
    K: int
    n: int

    @property
    def y1(self):
        return -self.t / (self.kappa - self.t)

    @property
    def y2(self):
        return self.kappa * self.t / (self.kappa - self.t) ** 3

    @property
    def y3(self):
        k, t = self.kappa, self.t
        return t * (2 * k * (k - t) - 3 * k * k) / (k - t) ** 5

    @property
    def y3_alternate(self):
        k, t = self.kappa, self.t
        return t * (2 * (k - t) - 3 * k * k) / (k - t) ** 5

    @property
    def coefficients(self):
        return (self.y1, self.y2, self.y3)


def _endpoint_coefficients(kind, k, t, convention):
    d = t - k
    if convention == "alternate":
        a2 = -t * (2 * k - 3 * k * k - 2 * t) / d ** 5
        if kind == "a":
            return (t / d, -k * t / d ** 3, a2)
        if kind == "b":
            return (k / d, -k * t / d ** 3, a2)
        return (k * k / (t * d),
                ((k - 1) * t * t - 2 * t * k * k + k ** 3) / (t * d ** 3),
                ((2 - k) * t * t + (5 * k * k - 2 * k) * t - k ** 3) / d ** 5)
    if kind == "a":
        return (t / d, -k * t / d ** 3, k * t * (k + 2 * t) / d ** 5)
    if kind == "b":
        return (k / d, -k * t / d ** 3, k * t * (k + 2 * t) / d ** 5)
    return (k * k / (t * d),
            -k * k * (2 * t - k) / (t * d ** 3),
            k * (t * t + 3 * k * t - k * k) / d ** 5)


def endpoint_expansion(kappa: float, n: int, t: float, order: int = 2) -> LaplaceEndpointExpansion:
    if not 0 < kappa <= 1:
        raise ValueError("kappa must lie in (0, 1]")
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    K = int(round(kappa * n))
    if K < 1:
        raise ValueError("kappa n rounds to zero")
    k = K / n
    if t - k <= POLE_GUARD:
        raise ValueError(f"t={t} too close to (or below) the expansion pole kappa={k}")
    return LaplaceEndpointExpansion(k, float(t), order, K, int(n))


def endpoint_expansion_value(kind: str, kappa: float, n: int, t: float, order: int = 2,
                             convention: str = "derived") -> tuple[float, int]:
    """(log |value|, sign) of the truncated endpoint expansion of a_K, b_K or c_K at x = n t.

    kappa n is rounded to the nearest integer K and the coefficients use K / n.
    ``convention="alternate"`` uses an alternative set of higher-order coefficients
    that coincides with the derived one for a_K only at kappa = 1 (kept for comparison).
    """
    if kind not in ("a", "b", "c"):
        raise ValueError("kind must be 'a', 'b' or 'c'")
    if convention not in ("derived", "alternate"):
        raise ValueError("convention must be 'derived' or 'alternate'")
    e = endpoint_expansion(kappa, n, t, order)
    coef = _endpoint_coefficients(kind, e.kappa, e.t, convention)
    series = math.fsum(coef[i] / n ** i for i in range(order + 1))
    power = {"a": 0, "b": 1, "c": 2}[kind]
    x = n * t
    log_prefactor = (e.K + power) * math.log(x) - gammaln(e.K + 1)
    if series == 0:
        return -math.inf, 0
    return log_prefactor + math.log(abs(series)), 1 if series > 0 else -1


def direct_log_sum(kind: str, kappa: float, n: int, t: float) -> float:
    """log of a_K, b_K or c_K (Weyl weights) at x = n t by direct scaled summation."""
    K = int(round(kappa * n))
    s = scaled_power_sums(make_profile("weyl", K), K, n * t)
    mant = {"a": s.a, "b": s.b, "c": s.c}[kind]
    return s.log_scale + math.log(mant)


def endpoint_relative_error(kind: str, kappa: float, n: int, t: float, order: int = 2,
                            convention: str = "derived") -> float:
    lv, sign = endpoint_expansion_value(kind, kappa, n, t, order, convention)
    if sign <= 0:
        return math.inf
    return abs(math.expm1(lv - direct_log_sum(kind, kappa, n, t)))


# ---------------------------------------------------------------------------
# predictions

REGIMES = ("m_fixed", "m_proportional", "m_equals_n")


@dataclass(frozen=True)
class AsymptoticPrediction:
    kind: str
    n: int
    m: int
    regime: str
    value: float
    formula_id: str


def classify_regime(n: int, m: int, regime: str | None = None) -> str:
    if regime is not None:
        if regime not in REGIMES:
            raise ValueError(f"unknown regime {regime!r}")
        return regime
    if m == n:
        return "m_equals_n"
    if m == 0:
        return "m_fixed"
    raise ValueError("regime is ambiguous for 0 < m < n; pass regime='m_fixed' or 'm_proportional'")


def predict_expected_zeros(kind: str, n: int, m: int, mode: str = "theorem",
                           regime: str | None = None) -> AsymptoticPrediction:
    """Leading-order prediction of E N(C) for the Weyl and Kostlan ensembles."""
    kind = normalize_kind(kind)
    n, m = int(n), int(m)
    if not 0 <= m <= n or n < 1:
        raise ValueError("need 0 <= m <= n and n >= 1")
    if mode not in ("theorem", "conjecture"):
        raise ValueError("mode must be 'theorem' or 'conjecture'")
    regime = classify_regime(n, m, regime)
    if kind == "naive":
        raise ValueError("naive ensemble has no closed-form constant: only "
                         "c1 n log n <= E N <= c2 n log n is known for m = n")
    if kind.startswith("truncated"):
        raise ValueError("truncated ensemble: the constant c_alpha is not available in closed form")

    if mode == "conjecture":
        if kind != "weyl":
            raise ValueError("conjecture mode is defined for the weyl ensemble only")
        return AsymptoticPrediction(kind, n, m, regime, m ** 1.5 / 3.0 + n, "weyl_conjecture")

    if kind == "weyl":
        if regime == "m_fixed":
            return AsymptoticPrediction(kind, n, m, regime, float(n), "weyl_m_fixed")
        return AsymptoticPrediction(kind, n, m, regime, m ** 1.5 / 3.0, "weyl_m_proportional")
    # kostlan
    if regime == "m_equals_n":
        return AsymptoticPrediction(kind, n, m, regime, math.pi / 4.0 * n ** 1.5, "kostlan_m_equals_n")
    return AsymptoticPrediction(kind, n, m, regime, float(n), "kostlan_alpha_below_one")
