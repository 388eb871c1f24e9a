"""Expected zero counts over radially symmetric regions.

The count in a region is the integral of the first intensity over x = |z|^2
(dA = pi d(r^2)), evaluated in the scaled variable t = x / n.  The t-axis is cut
a priori at 1/n, m/n, 1 and 2, which separate the regimes of the integrand:
a sqrt(t)-like core, a plateau, a boundary layer at t = 1 and an algebraic
tail.  The first panel is integrated in u = sqrt(t); the tail [2, inf) is
integrated exactly in v = 2 / t, where the integrand is bounded.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .ensembles import VarianceProfile
from .intensity import first_intensity

# Gauss-Kronrod 15/7 abscissae and weights on [-1, 1] (nonnegative half)
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[[1, 3, 5]] = _WG[:3]
GAUSS_WEIGHTS[[9, 11, 13]] = _WG[2::-1]
GAUSS_WEIGHTS[7] = _WG[3]

TAIL_START = 2.0


def gk15(f, a, b):
    """(Kronrod estimate, |Kronrod - Gauss|) for the integral of vectorized f on [a, b]."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    y = np.asarray(f(mid + half * NODES), dtype=np.float64)
    k = half * float(np.dot(KRONROD_WEIGHTS, y))
    g = half * float(np.dot(GAUSS_WEIGHTS, y))
    return k, abs(k - g)


@dataclass
class AdaptiveResult:
    value: float
    abs_error: float
    evaluations: int
    converged: bool
    panels: int


def adaptive_integrate(f, intervals, rel_tol=1e-8, abs_tol=0.0, max_evals=200_000):
    """Globally adaptive GK15 over a list of (a, b, g) panels, g vectorized on [a, b].

    The panel with the largest error estimate is bisected until the summed error
    is below max(abs_tol, rel_tol * |value|) or the evaluation budget is spent.
    """
    heap = []
    evals = 0
    counter = 0
    for a, b, g in intervals:
        if b <= a:
            continue
        v, e = gk15(g, a, b)
        evals += 15
        heap.append((-e, counter, a, b, v, g))
        counter += 1
    heapq.heapify(heap)

    def totals():
        vals = math.fsum(item[4] for item in heap)
        errs = math.fsum(-item[0] for item in heap)
        return vals, errs

    value, err = totals()
    while heap and err > max(abs_tol, rel_tol * abs(value)):
        if evals + 30 > max_evals:
            return AdaptiveResult(value, err, evals, False, len(heap))
        _, _, a, b, _, g = heapq.heappop(heap)
        c = 0.5 * (a + b)
        if not (a < c < b):
            # interval exhausted at double precision; accept what we have
            return AdaptiveResult(value, err, evals, False, len(heap) + 1)
        for lo, hi in ((a, c), (c, b)):
            v, e = gk15(g, lo, hi)
            heapq.heappush(heap, (-e, counter, lo, hi, v, g))
            counter += 1
        evals += 30
        value, err = totals()
    return AdaptiveResult(value, err, evals, True, len(heap))


# ---------------------------------------------------------------------------
# regions


@dataclass(frozen=True)
class Region:
    kind: str = "plane"
    r_inner: float = 0.0
    r_outer: float = math.inf

    def __post_init__(self):
        if self.kind not in ("plane", "disc", "annulus"):
            raise ValueError(f"invalid region kind {self.kind!r}")
        if self.kind == "plane":
            object.__setattr__(self, "r_inner", 0.0)
            object.__setattr__(self, "r_outer", math.inf)
        elif self.kind == "disc":
            object.__setattr__(self, "r_inner", 0.0)
        if not (0.0 <= self.r_inner < self.r_outer):
            raise ValueError("region needs 0 <= r_inner < r_outer")
        if self.kind != "plane" and not math.isfinite(self.r_outer):
            raise ValueError("disc/annulus radius must be finite")

    @classmethod
    def parse(cls, text: str) -> "Region":
        """'plane', 'disc:R' or 'annulus:R1,R2'."""
        s = text.strip().lower()
        if s == "plane":
            return cls("plane")
        kind, _, rest = s.partition(":")
        try:
            vals = [float(v) for v in rest.split(",")] if rest else []
        except ValueError:
            raise ValueError(f"invalid region {text!r}") from None
        if kind == "disc" and len(vals) == 1:
            return cls("disc", 0.0, vals[0])
        if kind == "annulus" and len(vals) == 2:
            return cls("annulus", vals[0], vals[1])
        raise ValueError(f"invalid region {text!r}")

    def __str__(self):
        if self.kind == "plane":
            return "plane"
        if self.kind == "disc":
            return f"disc:{self.r_outer!r}"
        return f"annulus:{self.r_inner!r},{self.r_outer!r}"


@dataclass
class QuadratureResult:
    value: float
    abs_error_estimate: float
    evaluations: int
    truncation_point: float | None
    converged: bool = True

    def as_dict(self):
        return {
            "expected_zeros": self.value,
            "abs_error_estimate": self.abs_error_estimate,
            "evaluations": self.evaluations,
            "truncation_point": self.truncation_point,
            "converged": self.converged,
        }


def _panels(f, n, m, t0, t1):
    """Mapped panels covering [t0, t1] in t (t1 may be inf)."""
    cuts = {1.0 / n, 1.0, TAIL_START}
    if m > 0:
        cuts.add(m / n)
    finite_end = min(t1, TAIL_START) if math.isinf(t1) else t1
    edges = [t0] + sorted(c for c in cuts if t0 < c < finite_end) + [finite_end]
    panels = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        if lo == 0.0:
            panels.append((0.0, math.sqrt(hi), lambda u: 2.0 * u * f(u * u)))
        else:
            panels.append((lo, hi, f))
    if math.isinf(t1):
        T = max(TAIL_START, t0)
        panels.append((0.0, 1.0, lambda v: (T / (v * v)) * f(T / v)))
    return panels


def expected_zeros(profile_p: VarianceProfile, profile_q: VarianceProfile | None,
                   n: int, m: int, region: Region | str = "plane", rel_tol: float = 1e-8,
                   max_evals: int = 200_000) -> QuadratureResult:
    """Expected number of zeros of H_{n,m} in a radially symmetric region."""
    if not 1e-12 <= rel_tol <= 1e-2:
        raise ValueError("rel_tol must lie in [1e-12, 1e-2]")
    if isinstance(region, str):
        region = Region.parse(region)
    n, m = int(n), int(m)
    if n < 1:
        raise ValueError("need n >= 1")
    if profile_q is not None and not 0 <= m <= n:
        raise ValueError("need 0 <= m <= n")

    def f(t):
        return n * first_intensity(profile_p, profile_q, n, m, n * t)

    t0 = region.r_inner ** 2 / n
    t1 = region.r_outer ** 2 / n
    res = adaptive_integrate(f, _panels(f, n, m, t0, t1), rel_tol=rel_tol, max_evals=max_evals)
    trunc = max(TAIL_START, t0) if math.isinf(t1) else None
    return QuadratureResult(max(res.value, 0.0), res.abs_error, res.evaluations, trunc, res.converged)


def expected_zeros_cumulative(profile_p: VarianceProfile, profile_q: VarianceProfile | None,
                              n: int, m: int, radii, rel_tol: float = 1e-8) -> list[float]:
    """Expected counts in the discs |z| < r for each r of an ascending list."""
    radii = [float(r) for r in radii]
    if any(r <= 0 for r in radii) or any(b < a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be positive and ascending")
    out = []
    total = 0.0
    prev = 0.0
    for r in radii:
        if r > prev:
            reg = Region("disc", 0.0, r) if prev == 0.0 else Region("annulus", prev, r)
            total += expected_zeros(profile_p, profile_q, n, m, reg, rel_tol).value
        out.append(total)
        prev = r
    return out
