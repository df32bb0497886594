"""duelopt: nonsmooth optimization from noisy pairwise comparisons.

The oracle answers only "is f(y) preferred to f(x)?" through a known
link function.  An exactly unbiased gap estimator (Bernoulli-product
series with randomized truncation) feeds a randomized-smoothing SGD loop,
and a statistical harness verifies every quantitative property at desk
scale.
"""

from .errors import (
    BudgetError,
    ConfigError,
    DueloptError,
    FitError,
    RunDivergedError,
    ValidityError,
)
from .estimator import (
    EstimatorConfig,
    GapEstimate,
    TruncationSchedule,
    default_beta,
    estimate_gap,
    estimate_gap_general,
    estimate_gap_logistic,
    predicted_cost,
    sample_truncation,
)
from .links import (
    CAUCHIT,
    LOGISTIC,
    PROBIT,
    CoefficientSeries,
    LinkSpec,
    OperatedInterval,
    bernoulli_product_poly,
    evaluate_series,
    fit_odd_coefficients,
    interval_for_gap_bound,
    inverse,
    logistic_coefficients,
    operated_interval,
    sigma,
)
from .objectives import Abs1D, L1Norm, MaxAffine, SmoothQuadratic, abs1d_smoothed_gradient
from .optimizer import RunReport, SGDParams, iteration_budget, run, step_size_plan
from .oracle import BlockOutcome, ComparisonOracle
from .seeding import make_rng
from .smoothing import (
    GradientSample,
    SmoothingParams,
    gradient_sample,
    reference_smoothed_gradient,
    sample_sphere,
)

__version__ = "0.1.0"

__all__ = [
    "Abs1D",
    "BlockOutcome",
    "BudgetError",
    "CAUCHIT",
    "CoefficientSeries",
    "ComparisonOracle",
    "ConfigError",
    "DueloptError",
    "EstimatorConfig",
    "FitError",
    "GapEstimate",
    "GradientSample",
    "L1Norm",
    "LOGISTIC",
    "LinkSpec",
    "MaxAffine",
    "OperatedInterval",
    "PROBIT",
    "RunDivergedError",
    "RunReport",
    "SGDParams",
    "SmoothQuadratic",
    "SmoothingParams",
    "TruncationSchedule",
    "ValidityError",
    "abs1d_smoothed_gradient",
    "bernoulli_product_poly",
    "default_beta",
    "estimate_gap",
    "estimate_gap_general",
    "estimate_gap_logistic",
    "evaluate_series",
    "fit_odd_coefficients",
    "gradient_sample",
    "interval_for_gap_bound",
    "inverse",
    "iteration_budget",
    "logistic_coefficients",
    "make_rng",
    "operated_interval",
    "predicted_cost",
    "reference_smoothed_gradient",
    "run",
    "sample_sphere",
    "sigma",
    "step_size_plan",
]
