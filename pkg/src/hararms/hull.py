"""Piecewise-linear log-scale hulls for adaptive rejection samplers.

A hull is a piecewise-linear function h over a bounded interval whose
exponential serves as a proposal density.  Two flavours are built from the
same set of support points (abscissae):

* the ARS hull, the minimum of the two outer secants on each
  inter-abscissa segment (a true envelope when the log-density is concave);
* the ARMS pseudo-hull, the maximum of the inner secant and the minimum of
  the outer secants, which need not dominate a non-concave log-density and
  is corrected downstream by a Metropolis step.

All segment masses are kept in log space; segments are truncated
exponentials sampled by CDF inversion.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "Abscissae",
    "HullSegment",
    "PiecewiseHull",
    "HullError",
    "secant",
    "segment_log_mass",
    "build_ars_hull",
    "build_arms_hull",
    "sample_hull",
    "insert_point",
    "default_abscissae",
]

# two abscissae closer than this are considered duplicates
DUPLICATE_TOL = 1e-12
# |slope * width| below this switches segment mass to the flat-segment series
FLAT_SLOPE_TOL = 1e-12
DEFAULT_CAP = 100


class HullError(ValueError):
    """Raised for invalid abscissae or degenerate hull geometry."""


@dataclass(frozen=True)
class Abscissae:
    """Strictly increasing support points with their log-density values.

    Points must lie strictly inside the bounded support interval and carry
    finite log values; at least 4 points are required so every interior
    segment has both outer secants defined.
    """

    points: np.ndarray
    log_values: np.ndarray
    support: tuple[float, float]
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        vals = np.asarray(self.log_values, dtype=float)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "log_values", vals)
        a, b = self.support
        if not (np.isfinite(a) and np.isfinite(b) and a < b):
            raise HullError(f"support must be a bounded interval, got {self.support}")
        if pts.ndim != 1 or pts.shape != vals.shape:
            raise HullError("points and log_values must be 1-D arrays of equal length")
        if len(pts) < 4:
            raise HullError(f"need at least 4 abscissae, got {len(pts)}")
        if np.any(np.diff(pts) <= 0):
            raise HullError("abscissae must be strictly increasing")
        if pts[0] <= a or pts[-1] >= b:
            raise HullError("abscissae must lie strictly inside the support")
        if not np.all(np.isfinite(vals)):
            raise HullError("log values must be finite")

    def __len__(self):
        return len(self.points)

    @property
    def at_cap(self) -> bool:
        return len(self.points) >= self.cap


@dataclass(frozen=True)
class HullSegment:
    """One linear piece of a hull: h(x) = slope*x + intercept on [lo, hi]."""

    lo: float
    hi: float
    slope: float
    intercept: float
    log_mass: float


@dataclass(frozen=True)
class PiecewiseHull:
    """A piecewise-linear function with precomputed segment log-masses.

    `breaks` has one more entry than the coefficient arrays; segment i
    covers [breaks[i], breaks[i+1]].
    """

    breaks: np.ndarray
    slopes: np.ndarray
    intercepts: np.ndarray
    log_masses: np.ndarray
    total_log_mass: float
    kind: str  # "ars" or "arms"

    @property
    def segments(self) -> list[HullSegment]:
        return [
            HullSegment(self.breaks[i], self.breaks[i + 1],
                        self.slopes[i], self.intercepts[i], self.log_masses[i])
            for i in range(len(self.slopes))
        ]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.clip(np.searchsorted(self.breaks, x, side="right") - 1,
                      0, len(self.slopes) - 1)
        return self.slopes[idx] * x + self.intercepts[idx]

    def sample(self, rng, size=None):
        return sample_hull(self, rng, size=size)

    def to_dict(self) -> dict:
        """Diagnostic JSON-serializable dump of the segment list."""
        return {
            "kind": self.kind,
            "total_log_mass": self.total_log_mass,
            "segments": [
                {"lo": s.lo, "hi": s.hi, "slope": s.slope,
                 "intercept": s.intercept, "log_mass": s.log_mass}
                for s in self.segments
            ],
        }


def secant(p1, p2):
    """Line (slope, intercept) through two points; errors on equal x."""
    x1, y1 = p1
    x2, y2 = p2
    if x1 == x2:
        raise HullError(f"degenerate secant: coincident abscissae at x={x1}")
    slope = (y2 - y1) / (x2 - x1)
    intercept = y1 - slope * x1
    return slope, intercept


def segment_log_mass(slope, intercept, lo, hi):
    """log of the integral of exp(slope*x + intercept) over [lo, hi].

    Evaluated fully in log space; near-zero slopes fall back to the
    midpoint series to avoid cancellation in exp(s*hi) - exp(s*lo).
    """
    slope = float(slope)
    intercept = float(intercept)
    lo = float(lo)
    hi = float(hi)
    if not all(np.isfinite(v) for v in (slope, intercept, lo, hi)):
        raise HullError("segment_log_mass requires finite inputs")
    if not lo < hi:
        raise HullError(f"empty segment [{lo}, {hi}]")
    width = hi - lo
    if abs(slope * width) < FLAT_SLOPE_TOL:
        return np.log(width) + intercept + slope * 0.5 * (lo + hi)
    # integral = exp(c) * (exp(s*hi) - exp(s*lo)) / s
    #          = exp(c + s*top) * (1 - exp(-|s|*width)) / |s|
    top = hi if slope > 0 else lo
    return (intercept + slope * top
            + np.log(-np.expm1(-abs(slope) * width))
            - np.log(abs(slope)))


def _segment_log_mass_vec(slopes, intercepts, lo, hi):
    """Vectorized segment_log_mass over parallel arrays."""
    width = hi - lo
    sw = slopes * width
    flat = np.abs(sw) < FLAT_SLOPE_TOL
    s = np.where(flat, 1.0, slopes)  # dummy for the flat branch
    top = np.where(slopes > 0, hi, lo)
    with np.errstate(divide="ignore", invalid="ignore"):
        steep = (intercepts + slopes * top
                 + np.log(-np.expm1(-np.abs(s) * width)) - np.log(np.abs(s)))
    return np.where(flat,
                    np.log(width) + intercepts + slopes * 0.5 * (lo + hi),
                    steep)


def _logsumexp(a):
    a = np.asarray(a, dtype=float)
    m = np.max(a)
    if not np.isfinite(m):
        return m
    return m + np.log(np.sum(np.exp(a - m)))


def _crossing(line1, line2):
    """x where two lines meet, or None if (nearly) parallel."""
    ds = line1[0] - line2[0]
    if ds == 0.0:
        return None
    return (line2[1] - line1[1]) / ds


def _single_line_pieces(lo, hi, lines, combine):
    """Split [lo, hi] so the composite of `lines` is a single line per piece.

    `combine` maps the tuple of line values at a point to the composite
    value; the active line on each sub-interval is identified at its
    midpoint.
    """
    cuts = [lo, hi]
    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            x = _crossing(lines[i], lines[j])
            if x is not None and lo < x < hi:
                cuts.append(x)
    cuts = sorted(set(cuts))
    pieces = []
    for left, right in zip(cuts[:-1], cuts[1:]):
        if right - left <= 0.0:
            continue
        mid = 0.5 * (left + right)
        vals = [s * mid + c for s, c in lines]
        target = combine(vals)
        k = min(range(len(vals)), key=lambda i: abs(vals[i] - target))
        pieces.append((left, right, lines[k][0], lines[k][1]))
    return pieces


def _build_hull(abscissae: Abscissae, kind: str) -> PiecewiseHull:
    pts = abscissae.points
    vals = abscissae.log_values
    a, b = abscissae.support
    n = len(pts)
    # consecutive secants; sec[i] passes through points i and i+1
    sec = [secant((pts[i], vals[i]), (pts[i + 1], vals[i + 1]))
           for i in range(n - 1)]

    raw = []  # (lo, hi, slope, intercept)
    if a < pts[0]:
        raw.append((a, pts[0], *sec[0]))
    for l in range(n - 1):
        lo, hi = pts[l], pts[l + 1]
        outer = []
        if l - 1 >= 0:
            outer.append(sec[l - 1])
        if l + 1 <= n - 2:
            outer.append(sec[l + 1])
        if kind == "ars":
            lines = outer
            combine = min
        else:
            # ARMS composite: max of the inner secant and the min of the
            # outer secants (the min reduces to the single available outer
            # secant on the first and last segments)
            lines = [sec[l]] + outer
            combine = lambda vals: max(vals[0], min(vals[1:]))
        raw.extend(_single_line_pieces(lo, hi, lines, combine))
    if pts[-1] < b:
        raw.append((pts[-1], b, *sec[-1]))

    breaks = np.array([p[0] for p in raw] + [raw[-1][1]])
    slopes = np.array([p[2] for p in raw])
    intercepts = np.array([p[3] for p in raw])
    log_masses = _segment_log_mass_vec(slopes, intercepts,
                                       breaks[:-1], breaks[1:])
    return PiecewiseHull(breaks, slopes, intercepts, log_masses,
                         float(_logsumexp(log_masses)), kind)


def _cached_hull(abscissae: Abscissae, kind: str) -> PiecewiseHull:
    # abscissae are immutable, so each instance can carry its built hulls;
    # samplers rebuild from the same instance on every non-adapting step
    cache = abscissae.__dict__.get("_hull_cache")
    if cache is None:
        cache = {}
        object.__setattr__(abscissae, "_hull_cache", cache)
    if kind not in cache:
        cache[kind] = _build_hull(abscissae, kind)
    return cache[kind]


def build_ars_hull(abscissae: Abscissae, support=None) -> PiecewiseHull:
    """ARS upper hull: min of the outer secants on each segment.

    Dominates the log-density whenever it is concave.
    """
    abscissae = _with_support(abscissae, support)
    return _cached_hull(abscissae, "ars")


def build_arms_hull(abscissae: Abscissae, support=None) -> PiecewiseHull:
    """ARMS pseudo-hull: max of inner secant and min of outer secants.

    Coincides with the ARS hull when the log-density is concave.
    """
    abscissae = _with_support(abscissae, support)
    return _cached_hull(abscissae, "arms")


def _with_support(abscissae: Abscissae, support):
    if support is None:
        return abscissae
    if tuple(support) != tuple(abscissae.support):
        return replace(abscissae, support=(float(support[0]), float(support[1])))
    return abscissae


def sample_hull(hull: PiecewiseHull, rng, size=None):
    """Draw from the density exp(h)/M: pick a segment by mass, then invert
    the truncated-exponential CDF inside it."""
    probs = np.exp(hull.log_masses - hull.total_log_mass)
    cum = np.cumsum(probs)
    cum[-1] = 1.0
    scalar = size is None
    n = 1 if scalar else int(size)
    u_seg = rng.random(n)
    idx = np.searchsorted(cum, u_seg, side="left")
    idx = np.clip(idx, 0, len(hull.slopes) - 1)
    u = rng.random(n)
    lo = hull.breaks[idx]
    hi = hull.breaks[idx + 1]
    s = hull.slopes[idx]
    w = hi - lo
    sw = s * w
    x = np.empty(n)
    flat = np.abs(sw) < FLAT_SLOPE_TOL
    x[flat] = lo[flat] + u[flat] * w[flat]
    pos = ~flat & (sw > 0)
    # x = hi + log(1 - (1-u)(1 - e^{-sw}))/s, stable for large positive sw
    x[pos] = hi[pos] + np.log1p((1.0 - u[pos]) * np.expm1(-sw[pos])) / s[pos]
    neg = ~flat & (sw < 0)
    # x = lo + log(1 + u(e^{sw} - 1))/s, stable for negative sw
    x[neg] = lo[neg] + np.log1p(u[neg] * np.expm1(sw[neg])) / s[neg]
    x = np.clip(x, lo, hi)
    return float(x[0]) if scalar else x


def insert_point(abscissae: Abscissae, x: float, logf_x: float):
    """Merge a new support point, returning (abscissae, inserted).

    Duplicates (within tolerance) and cap-saturated sets come back
    unchanged with inserted=False; a non-finite log value is an error.
    """
    x = float(x)
    if not np.isfinite(logf_x):
        raise HullError(f"cannot insert point with non-finite log value at x={x}")
    a, b = abscissae.support
    if not a < x < b:
        raise HullError(f"insertion point {x} outside support ({a}, {b})")
    if np.min(np.abs(abscissae.points - x)) <= DUPLICATE_TOL:
        return abscissae, False
    if abscissae.at_cap:
        return abscissae, False
    i = int(np.searchsorted(abscissae.points, x))
    pts = np.insert(abscissae.points, i, x)
    vals = np.insert(abscissae.log_values, i, float(logf_x))
    return replace(abscissae, points=pts, log_values=vals), True


def default_abscissae(logf, support, n_init: int = 5, cap: int = DEFAULT_CAP,
                      extra_point=None) -> Abscissae:
    """Initial abscissae at interior fractions {1/(n+1), ..., n/(n+1)}.

    Candidate points where logf is -inf are dropped; the grid is densified
    (up to 81 candidates) until at least 4 finite points remain.
    `extra_point`, when given and finite, is merged in afterwards (used for
    the sampler's current location).
    """
    a, b = support
    pts = vals = None
    n = n_init
    while n <= 81:
        cand = a + (b - a) * (np.arange(1, n + 1) / (n + 1))
        cv = np.array([logf(x) for x in cand])
        keep = np.isfinite(cv)
        if keep.sum() >= 4:
            pts, vals = cand[keep], cv[keep]
            break
        n = 2 * n + 1
    if pts is None:
        raise HullError("could not find 4 points of finite log-density "
                        f"on support ({a}, {b})")
    absc = Abscissae(pts, vals, (float(a), float(b)), cap=cap)
    if extra_point is not None:
        x = float(extra_point)
        if a < x < b and np.min(np.abs(pts - x)) > 1e-9:
            lf = logf(x)
            if np.isfinite(lf):
                absc, _ = insert_point(absc, x, lf)
    return absc
