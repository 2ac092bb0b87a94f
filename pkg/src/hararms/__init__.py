"""Hit-and-run adaptive rejection Metropolis sampling.

Samplers (ARS, ARMS, Gibbs-ARMS, HARARMS) over box-bounded targets, with
Gaussian-mixture mode-coverage experiments and Bayesian free-knot spline
regression driven by the same machinery.
"""

from .hull import (
    Abscissae,
    HullError,
    PiecewiseHull,
    build_arms_hull,
    build_ars_hull,
    insert_point,
    sample_hull,
    secant,
    segment_log_mass,
)
from .samplers import (
    ArsSampler,
    ChainState,
    SamplerConfig,
    SamplingError,
    StepRecord,
    arms_step_1d,
    ars_sample,
    gibbs_arms_step,
    hararms_step,
    mh_step,
    random_direction,
    run_chain,
)
from .spline import (
    Dataset,
    SplineFit,
    SplineSpec,
    design_matrix,
    knot_log_likelihood,
    ols_fit,
    truncated_power,
)
from .targets import (
    LineRestriction,
    MixtureSpec,
    TargetDensity,
    line_restriction,
    mixture_log_density,
    mixture_target,
)

__version__ = "0.1.0"
