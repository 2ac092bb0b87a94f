"""Truncated-power-basis spline regression.

Provides the design matrix, the OLS profile fit, and the knot
log-likelihood that serves as the sampling target for free-knot fits:
with a flat prior on knot locations, the log-posterior is the profile
log-likelihood (up to a constant) obtained by plugging the OLS
coefficients and residual variance back into the Gaussian likelihood.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

__all__ = [
    "SplineSpec",
    "SplineFit",
    "Dataset",
    "truncated_power",
    "design_matrix",
    "ols_fit",
    "knot_log_likelihood",
    "gap_tolerance",
]

LOG_2PI = np.log(2.0 * np.pi)

# knot separation and boundary margin, as a fraction of the data range
GAP_TOL_FRACTION = 1e-6


@dataclass(frozen=True)
class SplineSpec:
    """Polynomial degree plus knot locations (knots in given order)."""

    degree: int
    knots: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "knots", np.asarray(self.knots, dtype=float))
        if self.degree < 1:
            raise ValueError("degree must be >= 1")

    @property
    def n_columns(self) -> int:
        return self.degree + 1 + len(self.knots)


@dataclass(frozen=True)
class SplineFit:
    """OLS profile fit: coefficients, residual variance, log-likelihood."""

    coefficients: np.ndarray
    sigma2_hat: float
    log_likelihood: float
    dof_denominator: int
    ok: bool = True  # False means the design was rank-deficient


@dataclass(frozen=True)
class Dataset:
    """Paired observations with x strictly ascending."""

    x: np.ndarray
    y: np.ndarray
    generating_spec: Optional[dict] = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        if x.shape != y.shape or x.ndim != 1:
            raise ValueError("x and y must be 1-D arrays of equal length")
        if np.any(np.diff(x) <= 0):
            raise ValueError("x must be strictly ascending")

    def __len__(self):
        return len(self.x)


def gap_tolerance(data: Dataset) -> float:
    """Minimum allowed knot separation (and boundary margin)."""
    return GAP_TOL_FRACTION * (data.x[-1] - data.x[0])


def truncated_power(x, knot, degree):
    """(x - knot)^degree for x > knot, else 0."""
    u = np.asarray(x, dtype=float) - knot
    return np.where(u > 0, u, 0.0) ** degree


def design_matrix(spec: SplineSpec, x) -> np.ndarray:
    """Columns [1, x, ..., x^degree, (x-k1)_+^degree, ..., (x-kK)_+^degree]."""
    x = np.asarray(x, dtype=float)
    cols = [x**p for p in range(spec.degree + 1)]
    for knot in spec.knots:
        cols.append(truncated_power(x, knot, spec.degree))
    return np.column_stack(cols)


_REJECTED = SplineFit(coefficients=np.array([]), sigma2_hat=np.nan,
                      log_likelihood=-np.inf, dof_denominator=0, ok=False)


def ols_fit(spec: SplineSpec, data: Dataset) -> SplineFit:
    """Least-squares profile fit via a rank-revealing solve.

    sigma2 = RSS / (n - c) with c the column count; the log-likelihood is
    the Gaussian log-density of the residuals at the plug-in estimates.
    Rank-deficient designs come back rejected with -inf log-likelihood.
    """
    X = design_matrix(spec, data.x)
    n, c = X.shape
    if n <= c + 1:
        raise ValueError(f"need more than {c + 1} observations, got {n}")
    beta, _, rank, _ = np.linalg.lstsq(X, data.y, rcond=None)
    if rank < c:
        return _REJECTED
    resid = data.y - X @ beta
    rss = float(resid @ resid)
    dof = n - c
    sigma2 = rss / dof
    if sigma2 <= 0.0:
        sigma2 = np.finfo(float).tiny  # exact interpolation
    ll = -0.5 * n * (LOG_2PI + np.log(sigma2)) - rss / (2.0 * sigma2)
    return SplineFit(coefficients=beta, sigma2_hat=sigma2,
                     log_likelihood=float(ll), dof_denominator=dof)


def knot_log_likelihood(knots, data: Dataset, degree: int) -> float:
    """Profile log-likelihood of a knot configuration.

    Knots are sorted internally (the value is permutation invariant);
    configurations violating the interior or minimum-gap constraints get
    -inf, which samplers treat as auto-rejected.
    """
    knots = np.sort(np.asarray(knots, dtype=float))
    tol = gap_tolerance(data)
    if len(knots) and (knots[0] < data.x[0] + tol or knots[-1] > data.x[-1] - tol):
        return -np.inf
    if len(knots) > 1 and np.min(np.diff(knots)) < tol:
        return -np.inf
    fit = ols_fit(SplineSpec(degree=degree, knots=knots), data)
    return fit.log_likelihood
