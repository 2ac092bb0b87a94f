"""Target densities for the samplers.

A target is an unnormalized log-density over a box-bounded domain.  The
module provides the Gaussian-mixture target used by the mode-coverage
experiment and the one-dimensional line restrictions consumed by the
hit-and-run sampler.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "TargetDensity",
    "MixtureSpec",
    "LineRestriction",
    "mixture_log_density",
    "mixture_target",
    "line_restriction",
]

LOG_2PI = np.log(2.0 * np.pi)


@dataclass(frozen=True)
class TargetDensity:
    """Evaluation contract: deterministic log-density over a bounded box.

    ``log_density`` maps a dim-vector to a real or -inf; -inf signals a
    hard constraint violation that samplers treat as auto-rejected.
    """

    dim: int
    log_density: Callable[[np.ndarray], float]
    bounding_box: np.ndarray  # shape (dim, 2)

    def __post_init__(self):
        box = np.asarray(self.bounding_box, dtype=float).reshape(self.dim, 2)
        object.__setattr__(self, "bounding_box", box)
        if np.any(box[:, 0] >= box[:, 1]):
            raise ValueError("bounding box intervals must have positive width")

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.bounding_box[:, 0])
                    and np.all(x <= self.bounding_box[:, 1]))


@dataclass(frozen=True)
class MixtureSpec:
    """Gaussian mixture with shared diagonal covariance."""

    means: np.ndarray      # (n_components, dim)
    cov_diag: np.ndarray   # (dim,)
    weights: np.ndarray    # (n_components,)

    def __post_init__(self):
        means = np.atleast_2d(np.asarray(self.means, dtype=float))
        cov = np.asarray(self.cov_diag, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "cov_diag", cov)
        object.__setattr__(self, "weights", w)
        if means.shape[1] != len(cov):
            raise ValueError("cov_diag length must match mean dimension")
        if len(w) != means.shape[0]:
            raise ValueError("one weight per component required")
        if np.any(cov <= 0):
            raise ValueError("variances must be positive")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {w.sum()!r}")

    @property
    def dim(self) -> int:
        return self.means.shape[1]


def mixture_log_density(spec: MixtureSpec, x) -> float:
    """Log of the weighted Gaussian-mixture density at x (log-sum-exp)."""
    x = np.asarray(x, dtype=float)
    d = x - spec.means  # (n_components, dim)
    quad = 0.5 * np.sum(d * d / spec.cov_diag, axis=1)
    log_norm = 0.5 * (spec.dim * LOG_2PI + np.sum(np.log(spec.cov_diag)))
    comp = np.log(spec.weights) - log_norm - quad
    m = np.max(comp)
    return float(m + np.log(np.sum(np.exp(comp - m))))


def mixture_target(spec: MixtureSpec, bounding_box=None) -> TargetDensity:
    """Wrap a mixture as a TargetDensity.

    Default box: per dimension, [min mean - 8 sd, max mean + 8 sd].
    """
    if bounding_box is None:
        sd = np.sqrt(spec.cov_diag)
        lo = spec.means.min(axis=0) - 8.0 * sd
        hi = spec.means.max(axis=0) + 8.0 * sd
        bounding_box = np.column_stack([lo, hi])
    return TargetDensity(
        dim=spec.dim,
        log_density=lambda x: mixture_log_density(spec, x),
        bounding_box=bounding_box,
    )


@dataclass(frozen=True)
class LineRestriction:
    """A line through `origin` along unit `direction`, clipped to the box.

    z=0 maps to the origin; z parametrizes arc length along the direction.
    """

    origin: np.ndarray
    direction: np.ndarray
    z_interval: tuple[float, float]

    def point(self, z: float) -> np.ndarray:
        return self.origin + z * self.direction


def line_restriction(target: TargetDensity, origin, direction):
    """Restrict a target to a line: returns (LineRestriction, 1-D log rule).

    The z-interval is the per-dimension clipping of the line against the
    bounding box, intersected across dimensions.
    """
    origin = np.asarray(origin, dtype=float)
    direction = np.asarray(direction, dtype=float)
    nrm = np.linalg.norm(direction)
    if nrm == 0.0:
        raise ValueError("direction must be nonzero")
    if abs(nrm - 1.0) > 1e-12:
        raise ValueError("direction must be a unit vector")
    if not target.contains(origin):
        raise ValueError("origin lies outside the bounding box")

    z_lo, z_hi = -np.inf, np.inf
    box = target.bounding_box
    for k in range(target.dim):
        dk = direction[k]
        if dk == 0.0:
            continue
        b1 = (box[k, 0] - origin[k]) / dk
        b2 = (box[k, 1] - origin[k]) / dk
        z_lo = max(z_lo, min(b1, b2))
        z_hi = min(z_hi, max(b1, b2))
    restriction = LineRestriction(origin, direction, (float(z_lo), float(z_hi)))

    def logf_1d(z):
        return target.log_density(origin + z * direction)

    return restriction, logf_1d
