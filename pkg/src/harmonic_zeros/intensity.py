"""First intensity of zeros and its radial / planar tabulations.

I(z) = (r1^2 + r2^2 - 2 r12^2) / (|z|^2 r3^2 sqrt((r1 + r2)^2 - 4 r12^2))

The expected number of zeros in a region T is (1/pi) * integral_T I dA, so the
expected number of zeros per unit area is I / pi.  Writing D = r1 - r2 and
Q = r1 r2 - r12^2 >= 0, the numerator is D^2 + 2Q and the radicand is D^2 + 4Q;
both are assembled from logs.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .ensembles import VarianceProfile
from .series import log_r_terms

LOG2 = math.log(2.0)
LOG4 = math.log(4.0)


def _origin_limit(profile_p, profile_q, n, m):
    v = profile_p.variances
    a0 = v[0]
    a1 = v[1] if n >= 1 else 0.0
    if profile_q is None:
        b0 = b1 = 0.0
    else:
        w = profile_q.variances
        b0 = w[0]
        b1 = w[1] if m >= 1 else 0.0
    if a1 + b1 == 0:
        return 0.0
    return (a1 * a1 + b1 * b1) / ((a0 + b0) * (a1 + b1))


def _check_degrees(profile_p, profile_q, n, m):
    if n is None:
        n = profile_p.degree
    if m is None:
        m = 0 if profile_q is None else profile_q.degree
    if profile_q is not None and not 0 <= m <= n:
        raise ValueError("need 0 <= m <= n")
    return int(n), int(m)


def log_intensity(profile_p: VarianceProfile, profile_q: VarianceProfile | None,
                  n: int | None, m: int | None, log_x) -> np.ndarray:
    """log I at each log x (x > 0)."""
    n, m = _check_degrees(profile_p, profile_q, n, m)
    log_x = np.atleast_1d(np.asarray(log_x, dtype=np.float64))
    rt = log_r_terms(profile_p, profile_q, n, m, log_x)
    d2 = 2.0 * rt.log_abs_delta
    num = np.logaddexp(d2, LOG2 + rt.log_gram_cross)
    rad = np.logaddexp(d2, LOG4 + rt.log_gram_cross)
    return num - log_x - 2.0 * rt.log_r3 - 0.5 * rad


def first_intensity(profile_p: VarianceProfile, profile_q: VarianceProfile | None,
                    n: int | None, m: int | None, x):
    """I_{n,m} at squared radius ``x`` (scalar or array, x >= 0).

    ``profile_q=None`` drops the anti-analytic part entirely.  At x = 0 the
    closed-form limit (alpha1^2 + beta1^2) / ((alpha0 + beta0)(alpha1 + beta1)) is
    returned.
    """
    n, m = _check_degrees(profile_p, profile_q, n, m)
    xa = np.asarray(x, dtype=np.float64)
    if np.any(~np.isfinite(xa)) or np.any(xa < 0):
        raise ValueError("squared radius must be finite and >= 0")
    flat = np.atleast_1d(xa).ravel()
    out = np.empty(flat.shape)
    pos = flat > 0
    if pos.any():
        with np.errstate(divide="ignore", invalid="ignore"):
            out[pos] = np.exp(log_intensity(profile_p, profile_q, n, m, np.log(flat[pos])))
    if (~pos).any():
        out[~pos] = _origin_limit(profile_p, profile_q, n, m)
    out = np.where(np.isnan(out), 0.0, out)
    if xa.ndim == 0:
        return float(out[0])
    return out.reshape(xa.shape)


def analytic_intensity(profile_p: VarianceProfile, profile_q: VarianceProfile | None,
                       n: int | None, m: int | None, x):
    """r1 / (x r3^2): the m = 0 form of the intensity, for cross-checking."""
    n, m = _check_degrees(profile_p, profile_q, n, m)
    lx = np.log(np.atleast_1d(np.asarray(x, dtype=np.float64)))
    rt = log_r_terms(profile_p, profile_q, n, m, lx)
    return np.exp(rt.log_r1 - lx - 2.0 * rt.log_r3)


def equal_degree_intensity(profile: VarianceProfile, n: int, x):
    """sqrt(a c (a c - b^2)) / (2 x a^2): the reduced form when p and q share a profile."""
    from .series import series_plan

    lx = np.log(np.atleast_1d(np.asarray(x, dtype=np.float64)))
    la, lb, lc, lg = series_plan(profile, n).log_sums(lx)
    return np.exp(0.5 * (la + lc + lg) - LOG2 - lx - 2.0 * la)


def scaled_integrand(profile_p: VarianceProfile, profile_q: VarianceProfile | None,
                     n: int | None, m: int | None, t):
    """f(t) = n * I(n t); the expected total count is the integral of f over t > 0."""
    n, m = _check_degrees(profile_p, profile_q, n, m)
    ta = np.asarray(t, dtype=np.float64)
    if np.any(ta <= 0):
        raise ValueError("scaled radius t must be positive")
    return n * first_intensity(profile_p, profile_q, n, m, n * ta)


# ---------------------------------------------------------------------------
# tabulations


@dataclass
class RadialIntensityProfile:
    radii: np.ndarray
    intensity: np.ndarray
    n: int
    m: int
    meta: dict = field(default_factory=dict)

    @property
    def density(self) -> np.ndarray:
        return self.intensity / math.pi

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "intensity", "density"])
        for r, i, d in zip(self.radii, self.intensity, self.density):
            w.writerow([repr(float(r)), repr(float(i)), repr(float(d))])
        return buf.getvalue()


def radial_profile(profile_p: VarianceProfile, profile_q: VarianceProfile | None,
                   n: int | None, m: int | None, r_max: float, points: int) -> RadialIntensityProfile:
    n, m = _check_degrees(profile_p, profile_q, n, m)
    if not r_max > 0 or int(points) < 2:
        raise ValueError("need r_max > 0 and points >= 2")
    radii = np.linspace(0.0, float(r_max), int(points))
    inten = first_intensity(profile_p, profile_q, n, m, radii * radii)
    meta = {"p_kind": profile_p.kind, "q_kind": None if profile_q is None else profile_q.kind}
    return RadialIntensityProfile(radii, inten, n, m, meta)


@dataclass
class DensityGrid:
    """Expected zeros per unit area on a square lattice; density[i, j] sits at (xs[j], ys[i])."""

    xs: np.ndarray
    ys: np.ndarray
    density: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y", "density"])
        for i, y in enumerate(self.ys):
            for j, x in enumerate(self.xs):
                w.writerow([repr(float(x)), repr(float(y)), repr(float(self.density[i, j]))])
        return buf.getvalue()


def _grid_from_radial(extent, resolution, radial_fn):
    if int(resolution) < 2 or not extent > 0:
        raise ValueError("need resolution >= 2 and extent > 0")
    axis = np.linspace(-float(extent), float(extent), int(resolution))
    r = np.hypot(axis[None, :], axis[:, None])
    # radial table fine enough that linear interpolation error is negligible
    table_r = np.linspace(0.0, float(extent) * math.sqrt(2.0), max(4 * int(resolution), 1024))
    table = radial_fn(table_r)
    return DensityGrid(axis, axis.copy(), np.interp(r, table_r, table))


def density_grid(profile_p: VarianceProfile, profile_q: VarianceProfile | None,
                 n: int | None, m: int | None, extent: float, resolution: int) -> DensityGrid:
    n, m = _check_degrees(profile_p, profile_q, n, m)
    return _grid_from_radial(
        extent, resolution,
        lambda r: first_intensity(profile_p, profile_q, n, m, r * r) / math.pi)


def difference_grid(profile_p: VarianceProfile, profile_q: VarianceProfile,
                    n: int, m: int, extent: float, resolution: int) -> DensityGrid:
    """Density of I_{n,m} - I_{n,0}: the part of the density attributable to q beyond its constant term."""
    q0 = profile_q.truncated(0)

    def diff(r):
        x = r * r
        return (first_intensity(profile_p, profile_q, n, m, x)
                - first_intensity(profile_p, q0, n, 0, x)) / math.pi

    return _grid_from_radial(extent, resolution, diff)
