"""Samplers: ARS, Metropolis-Hastings, 1-D ARMS, Gibbs-ARMS, and HARARMS.

ARS is exact for log-concave targets.  ARMS drops the concavity
requirement by drawing from the pseudo-hull and correcting with a
Metropolis step.  Gibbs-ARMS sweeps coordinates with 1-D ARMS on each
full conditional; HARARMS replaces the axis-parallel sweep with a single
ARMS step along a uniformly random direction through the current point.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .hull import (
    Abscissae,
    HullError,
    build_ars_hull,
    build_arms_hull,
    default_abscissae,
    insert_point,
)
from .targets import TargetDensity, line_restriction

__all__ = [
    "ChainState",
    "SamplerConfig",
    "StepRecord",
    "SamplingError",
    "ArsSampler",
    "ars_sample",
    "mh_step",
    "arms_step_1d",
    "gibbs_arms_step",
    "random_direction",
    "hararms_step",
    "run_chain",
]

# consecutive non-improving rejected draws before a squeeze loop gives up
# (ARS raises; an ARMS step degrades to staying at the current point)
MAX_SATURATED_REJECTIONS = 10_000
# retries for a degenerate hit-and-run line (current point on the boundary)
MAX_DIRECTION_ATTEMPTS = 100
DEGENERATE_INTERVAL = 1e-9


class SamplingError(RuntimeError):
    """Raised when a rejection loop cannot make progress."""


@dataclass
class ChainState:
    """Current sample, iteration counter and the chain's RNG."""

    x: np.ndarray
    rng: np.random.Generator
    iteration: int = 0

    def __post_init__(self):
        self.x = np.atleast_1d(np.asarray(self.x, dtype=float))

    @property
    def dim(self) -> int:
        return len(self.x)


@dataclass(frozen=True)
class SamplerConfig:
    n_iterations: int
    seed: int
    burn_in: int = 1000
    initial_abscissae_count: int = 5
    abscissae_cap: int = 100
    mh_proposal_scale: float = 1.0

    def __post_init__(self):
        if self.n_iterations <= 0:
            raise ValueError("n_iterations must be positive")
        if not 0 <= self.burn_in < self.n_iterations + self.burn_in + 1:
            raise ValueError("burn_in must be non-negative")
        if self.initial_abscissae_count < 4:
            raise ValueError("need at least 4 initial abscissae")


@dataclass
class StepRecord:
    """Per-step diagnostics; `direction` is set only for hit-and-run steps."""

    proposal: object
    accepted: bool
    hull_rebuilds: int = 0
    direction: Optional[np.ndarray] = None


class ArsSampler:
    """Adaptive rejection sampler with a persistent, tightening hull.

    Exactness requires the (caller-guaranteed) log-concavity of `logf` on
    the support; rejected proposals are inserted as new abscissae and the
    hull rebuilt, so the acceptance rate rises as sampling proceeds.
    """

    def __init__(self, logf, support, abscissae: Optional[Abscissae] = None,
                 n_init: int = 5, cap: int = 100):
        self.logf = logf
        self.support = (float(support[0]), float(support[1]))
        if abscissae is None:
            abscissae = default_abscissae(logf, self.support, n_init=n_init,
                                          cap=cap)
        self.abscissae = abscissae
        self.hull = build_ars_hull(self.abscissae)
        self._saturated_rejections = 0

    def _vector_logf(self, x):
        try:
            v = np.asarray(self.logf(x), dtype=float)
            if v.shape == x.shape:
                return v
        except (TypeError, ValueError):
            pass
        return np.array([self.logf(xi) for xi in x])

    def sample(self, n: int, rng) -> np.ndarray:
        """Draw n accepted samples, refining the hull on rejections."""
        out = np.empty(n)
        got = 0
        acc_rate = 0.5
        while got < n:
            batch = max(16, min(4096, int((n - got) / max(acc_rate, 0.05)) + 1))
            xs = self.hull.sample(rng, size=batch)
            hs = self.hull(xs)
            fs = self._vector_logf(xs)
            accept = np.log(rng.random(batch)) <= fs - hs
            kept = xs[accept][: n - got]
            out[got:got + len(kept)] = kept
            got += len(kept)
            acc_rate = max(accept.mean(), 0.01)
            rejected = ~accept
            if rejected.any():
                if self.abscissae.at_cap:
                    if not accept.any():
                        self._saturated_rejections += batch
                        if self._saturated_rejections > MAX_SATURATED_REJECTIONS:
                            raise SamplingError(
                                "abscissae cap reached with persistent "
                                "rejection; target may not be log-concave")
                    else:
                        self._saturated_rejections = 0
                else:
                    changed = False
                    for xr, fr in zip(xs[rejected], fs[rejected]):
                        if not np.isfinite(fr):
                            continue
                        self.abscissae, ins = insert_point(self.abscissae, xr, fr)
                        changed = changed or ins
                    if changed:
                        self.hull = build_ars_hull(self.abscissae)
        return out

    def sample_one(self, rng) -> float:
        return float(self.sample(1, rng)[0])


def ars_sample(logf, abscissae: Abscissae, rng):
    """One exact draw from exp(logf) by adaptive rejection sampling.

    Returns (x, updated abscissae).  The hull is rebuilt from the given
    abscissae; for bulk sampling use ArsSampler, which keeps the hull.
    """
    sampler = ArsSampler(logf, abscissae.support, abscissae=abscissae)
    x = sampler.sample_one(rng)
    return x, sampler.abscissae


def mh_step(state: ChainState, proposal_rule, target: TargetDensity) -> ChainState:
    """One Metropolis-Hastings step.

    `proposal_rule` must expose sample(x, rng) -> x' and
    log_density(x_to, x_from) -> real.
    """
    rng = state.rng
    x_prop = proposal_rule.sample(state.x, rng)
    lf_prop = target.log_density(x_prop) if target.contains(x_prop) else -np.inf
    if np.isfinite(lf_prop):
        lf_cur = target.log_density(state.x)
        log_ratio = (lf_prop + proposal_rule.log_density(state.x, x_prop)
                     - lf_cur - proposal_rule.log_density(x_prop, state.x))
        accept = np.log(rng.random()) < min(0.0, log_ratio)
    else:
        accept = False
    x_new = np.asarray(x_prop, dtype=float) if accept else state.x
    return ChainState(x=x_new, rng=rng, iteration=state.iteration + 1)


@dataclass
class GaussianRandomWalk:
    """Symmetric Gaussian proposal for mh_step."""

    scale: float = 1.0

    def sample(self, x, rng):
        return x + rng.normal(scale=self.scale, size=np.shape(x))

    def log_density(self, x_to, x_from):
        d = np.asarray(x_to) - np.asarray(x_from)
        return float(-0.5 * np.sum(d * d) / self.scale**2)


def arms_step_1d(logf, z_cur: float, abscissae: Abscissae, rng):
    """One ARMS transition on a 1-D target.

    Step 1 draws from the pseudo-hull until a draw survives the rejection
    test (rejected finite points are inserted, capped); step 2 applies the
    Metropolis correction
    min{1, f(xA) min[f(z), exp h(z)] / (f(z) min[f(xA), exp h(xA)])}.
    Returns (z_new, abscissae, StepRecord).

    If the squeeze loop cannot produce an accepted draw after the abscissae
    stop changing (a grossly loose hull on a sharply peaked target), the
    step degrades to a rejection: the chain stays at z_cur.
    """
    hull = build_arms_hull(abscissae)
    rebuilds = 1
    saturated = 0
    while True:
        x_a = hull.sample(rng)
        f_a = logf(x_a)
        if np.log(rng.random()) <= f_a - hull(x_a):
            break
        inserted = False
        if np.isfinite(f_a) and not abscissae.at_cap:
            abscissae, inserted = insert_point(abscissae, x_a, f_a)
            if inserted:
                hull = build_arms_hull(abscissae)
                rebuilds += 1
                saturated = 0
        if not inserted:
            saturated += 1
            if saturated > MAX_SATURATED_REJECTIONS:
                return z_cur, abscissae, StepRecord(
                    proposal=x_a, accepted=False, hull_rebuilds=rebuilds)

    f_cur = logf(z_cur)
    h_cur = float(hull(z_cur))
    h_a = float(hull(x_a))
    log_num = f_a + min(f_cur, h_cur)
    log_den = f_cur + min(f_a, h_a)
    accepted = np.log(rng.random()) < min(0.0, log_num - log_den)
    z_new = x_a if accepted else z_cur
    return z_new, abscissae, StepRecord(proposal=x_a, accepted=accepted,
                                        hull_rebuilds=rebuilds)


def _conditional_abscissae(logf, support, z_cur, config: SamplerConfig):
    return default_abscissae(logf, support,
                             n_init=config.initial_abscissae_count,
                             cap=config.abscissae_cap, extra_point=z_cur)


def gibbs_arms_step(state: ChainState, target: TargetDensity,
                    config: SamplerConfig):
    """One Gibbs sweep: 1-D ARMS on each full conditional, ascending order.

    Returns (new state, list of StepRecords, one per coordinate).
    """
    x = state.x.copy()
    records = []
    for k in range(target.dim):
        def cond_logf(z, k=k):
            xz = x.copy()
            xz[k] = z
            return target.log_density(xz)

        support = tuple(target.bounding_box[k])
        absc = _conditional_abscissae(cond_logf, support, x[k], config)
        z_new, _, rec = arms_step_1d(cond_logf, float(x[k]), absc, state.rng)
        x[k] = z_new
        records.append(rec)
    return ChainState(x=x, rng=state.rng, iteration=state.iteration + 1), records


def random_direction(dim: int, rng) -> np.ndarray:
    """Uniform direction on the unit sphere (normalized Gaussian draws)."""
    while True:
        u = rng.normal(size=dim)
        nrm = np.linalg.norm(u)
        if nrm > 1e-12:
            return u / nrm


def hararms_step(state: ChainState, target: TargetDensity,
                 config: SamplerConfig):
    """One hit-and-run ARMS step.

    Draws a random direction, restricts the target to the line through the
    current point (which sits at z = 0), runs a 1-D ARMS step on the
    restriction with a fresh hull, and moves to x + z_new * d.
    Returns (new state, StepRecord).
    """
    rng = state.rng
    for _ in range(MAX_DIRECTION_ATTEMPTS):
        d = random_direction(target.dim, rng)
        restriction, logf_z = line_restriction(target, state.x, d)
        z_lo, z_hi = restriction.z_interval
        if z_hi - z_lo < DEGENERATE_INTERVAL:
            continue
        try:
            absc = _conditional_abscissae(logf_z, (z_lo, z_hi), 0.0, config)
        except HullError:
            continue  # too little finite mass along this line
        z_new, _, rec = arms_step_1d(logf_z, 0.0, absc, rng)
        rec.direction = d
        x_new = state.x + z_new * d
        return (ChainState(x=x_new, rng=rng, iteration=state.iteration + 1),
                rec)
    raise SamplingError(
        f"no usable direction after {MAX_DIRECTION_ATTEMPTS} attempts "
        "(current point may sit on the bounding box)")


SAMPLER_NAMES = ("gibbs_arms", "hararms", "mh")


def run_chain(sampler: str, target: TargetDensity, config: SamplerConfig,
              x0) -> tuple[np.ndarray, list]:
    """Run burn_in + n_iterations steps; return post-burn-in samples.

    Output is an (n_iterations, dim) array plus the post-burn-in
    StepRecords.  Fully deterministic given (sampler, target, config, x0).
    """
    if sampler not in SAMPLER_NAMES:
        raise ValueError(f"unknown sampler {sampler!r}; choose from {SAMPLER_NAMES}")
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    rng = np.random.default_rng(config.seed)
    state = ChainState(x=x0, rng=rng)
    if not np.isfinite(target.log_density(state.x)):
        raise ValueError("initial point has zero target density")
    proposal = GaussianRandomWalk(scale=config.mh_proposal_scale)

    total = config.burn_in + config.n_iterations
    samples = np.empty((config.n_iterations, target.dim))
    records = []
    for i in range(total):
        if sampler == "hararms":
            state, rec = hararms_step(state, target, config)
            recs = [rec]
        elif sampler == "gibbs_arms":
            state, recs = gibbs_arms_step(state, target, config)
        else:
            state = mh_step(state, proposal, target)
            recs = []
        if i >= config.burn_in:
            samples[i - config.burn_in] = state.x
            records.extend(recs)
    return samples, records
