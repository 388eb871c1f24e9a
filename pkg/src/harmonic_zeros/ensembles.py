"""Gaussian coefficient ensembles and sampling of concrete harmonic polynomials."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

KINDS = ("weyl", "kostlan", "naive", "truncated_literal", "truncated_kostlan")

# binomials are exact Python ints up to this degree, log-gamma beyond
EXACT_BINOMIAL_MAX = 60
KOSTLAN_MAX_DEGREE = 1000


def normalize_kind(kind: str) -> str:
    k = str(kind).strip().lower().replace("-", "_")
    if k not in KINDS:
        raise ValueError(f"unknown ensemble kind {kind!r}; expected one of {', '.join(KINDS)}")
    return k


def _log_binomials(n: int, upto: int) -> np.ndarray:
    if n <= EXACT_BINOMIAL_MAX:
        return np.array([math.log(math.comb(n, j)) for j in range(upto + 1)])
    j = np.arange(upto + 1)
    from scipy.special import gammaln

    return gammaln(n + 1) - gammaln(j + 1) - gammaln(n - j + 1)


@dataclass(frozen=True, eq=False)
class VarianceProfile:
    """Variances E|a_j|^2 = variances[j], j = 0..degree, of one Gaussian polynomial.

    ``ambient`` is the n that parameterizes the binomials of a truncated_kostlan
    profile (``C(ambient, j)`` for ``j <= degree``); for every other kind it equals
    ``degree``.  ``log_scale`` is a global multiplicative factor ``exp(log_scale)``
    applied to all variances (used by scale-invariance checks).
    """

    kind: str
    degree: int
    ambient: int
    log_variances: np.ndarray = field(repr=False)
    log_scale: float = 0.0
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def variances(self) -> np.ndarray:
        if self.log_scale == 0.0:
            exact = self.exact_variances()
            if exact is not None:
                return np.array([float(v) for v in exact])
        return np.exp(self.log_variances)

    def exact_variances(self):
        """Closed-form variances as Python ints / Fractions, or None when out of exact range."""
        from fractions import Fraction

        if self.log_scale != 0.0:
            return None
        d = self.degree
        if self.kind == "weyl":
            return [Fraction(1, math.factorial(j)) for j in range(d + 1)]
        if self.kind in ("naive", "truncated_literal"):
            return [1] * (d + 1)
        if self.ambient <= EXACT_BINOMIAL_MAX:
            return [math.comb(self.ambient, j) for j in range(d + 1)]
        return None

    @property
    def key(self) -> tuple:
        return (self.kind, self.degree, self.ambient, self.log_scale)

    def scaled(self, factor: float) -> "VarianceProfile":
        """Same ensemble with every variance multiplied by ``factor`` > 0."""
        if not factor > 0:
            raise ValueError("scale factor must be positive")
        lf = math.log(factor)
        return VarianceProfile(self.kind, self.degree, self.ambient,
                               self.log_variances + lf, self.log_scale + lf)

    def truncated(self, degree: int) -> "VarianceProfile":
        """The first ``degree + 1`` variances of this profile."""
        if not 0 <= degree <= self.degree:
            raise ValueError("truncation degree out of range")
        return VarianceProfile(self.kind, degree, self.ambient,
                               self.log_variances[: degree + 1].copy(), self.log_scale)


def make_profile(kind: str, degree: int, ambient: int | None = None) -> VarianceProfile:
    """Variance profile of one ensemble.

    weyl: 1/j!; kostlan: C(degree, j); naive and truncated_literal: 1;
    truncated_kostlan: C(ambient, j) for j <= degree (ambient defaults to degree).
    """
    kind = normalize_kind(kind)
    degree = int(degree)
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    if kind == "truncated_kostlan":
        ambient = degree if ambient is None else int(ambient)
        if ambient < degree:
            raise ValueError("ambient degree must be >= truncation degree")
    else:
        ambient = degree
    if kind in ("kostlan", "truncated_kostlan") and ambient > KOSTLAN_MAX_DEGREE:
        raise OverflowError(f"binomial profile limited to degree {KOSTLAN_MAX_DEGREE}")

    j = np.arange(degree + 1)
    if kind == "weyl":
        from scipy.special import gammaln

        logv = -gammaln(j + 1.0)
    elif kind in ("naive", "truncated_literal"):
        logv = np.zeros(degree + 1)
    else:
        logv = _log_binomials(ambient, degree)
    return VarianceProfile(kind, degree, ambient, np.asarray(logv, dtype=np.float64))


def ensemble_pair(kind: str, n: int, m: int) -> tuple[VarianceProfile, VarianceProfile]:
    """(analytic-part profile, anti-analytic-part profile) of a named harmonic ensemble.

    The truncated models draw p from the Kostlan ensemble of degree n and differ
    only in the variances of q.
    """
    kind = normalize_kind(kind)
    if not 0 <= m <= n:
        raise ValueError("need 0 <= m <= n")
    if kind in ("weyl", "kostlan", "naive"):
        return make_profile(kind, n), make_profile(kind, m)
    p = make_profile("kostlan", n)
    if kind == "truncated_literal":
        return p, make_profile("truncated_literal", m)
    return p, make_profile("truncated_kostlan", m, ambient=n)


# ---------------------------------------------------------------------------
# sampling


@dataclass(frozen=True)
class HarmonicPolynomial:
    """H(z) = sum a_j z^j + sum b_j conj(z)^j with deg p = n >= m = deg q."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=np.complex128)
        b = np.asarray(self.b, dtype=np.complex128)
        if a.ndim != 1 or b.ndim != 1 or a.size == 0 or b.size == 0:
            raise ValueError("coefficient vectors must be nonempty 1-d arrays")
        if b.size > a.size:
            raise ValueError("need m <= n")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return self.a.size - 1

    @property
    def m(self) -> int:
        return self.b.size - 1

    def scaled(self, factor: complex) -> "HarmonicPolynomial":
        return HarmonicPolynomial(self.a * factor, self.b * factor)


def derive_seed(seed: int, *path: int) -> np.random.SeedSequence:
    """Child seed for (seed, path...) independent of execution order."""
    return np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=tuple(int(p) for p in path))


def _complex_normal(rng, log_var):
    sd = np.exp(0.5 * np.asarray(log_var)) * math.sqrt(0.5)
    re = rng.standard_normal(sd.size)
    im = rng.standard_normal(sd.size)
    return sd * (re + 1j * im)


def sample_coefficients(profile_p: VarianceProfile, profile_q: VarianceProfile,
                        seed) -> HarmonicPolynomial:
    """Draw one harmonic polynomial with independent circular complex Gaussian coefficients.

    ``seed`` is an int or a :class:`numpy.random.SeedSequence`.  Real and imaginary
    parts each carry half of the declared variance.
    """
    if profile_p.degree < profile_q.degree:
        raise ValueError("profile_p.degree must be >= profile_q.degree")
    rng = np.random.default_rng(seed)
    while True:
        a = _complex_normal(rng, profile_p.log_variances)
        b = _complex_normal(rng, profile_q.log_variances)
        # leading coefficients vanish with probability zero
        if a[-1] != 0 and b[-1] != 0:
            return HarmonicPolynomial(a, b)
