"""Comparison-driven SGD on the smoothed objective.

The loop is plain SGD with the comparison-based gradient sample: fresh
direction and fresh comparisons each step, x_{t+1} = x_t - eta * G_t, and
a uniformly random output index R drawn from a dedicated sub-seed so it is
independent of the trajectory.  A small smoothed-gradient norm at the
output certifies approximate stationarity of the original nonsmooth
objective within radius delta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import BudgetError, RunDivergedError
from .estimator import EstimatorConfig, predicted_cost
from .oracle import ComparisonOracle
from .seeding import make_rng
from .smoothing import SmoothingParams, gradient_sample, reference_smoothed_gradient

AUTO = "auto"

# sub-seed labels for the independent streams of one run
_STREAM_ORACLE = 0
_STREAM_ALGORITHM = 1
_STREAM_OUTPUT_INDEX = 2
_STREAM_DIAGNOSTIC = 3

_MAX_BUDGET = 2**63 - 1


@dataclass(frozen=True)
class SGDParams:
    """Run configuration.  ``eta`` and ``iterations`` accept "auto":
    the step size then follows the min{1/L_delta, sqrt(...)} rule and the
    iteration count the epsilon^-4 budget.

    ``initial_gap_bound`` (an upper bound on f_delta(x0) - inf f_delta)
    cannot be learned from comparisons alone and is a required input with
    documented default 1.0.  ``variance_constant`` should come from the
    harness' certified second-moment fit, or a user override.
    """

    delta: float
    epsilon_target: float
    eta: Union[float, str] = AUTO
    iterations: Union[int, str] = AUTO
    initial_gap_bound: float = 1.0
    variance_constant: float = 1.0
    seed: int = 0
    trace_points: int = 1000

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if not self.epsilon_target > 0:
            raise ValueError("epsilon target must be positive")
        if not self.initial_gap_bound > 0:
            raise ValueError("initial gap bound must be positive")
        if not self.variance_constant > 0:
            raise ValueError("variance constant must be positive")
        if self.eta != AUTO and not (isinstance(self.eta, (int, float)) and self.eta > 0):
            raise ValueError("eta must be positive or 'auto'")
        if self.iterations != AUTO and not (
            isinstance(self.iterations, (int, np.integer)) and self.iterations >= 1
        ):
            raise ValueError("iterations must be a positive integer or 'auto'")


@dataclass(frozen=True)
class RunReport:
    """Full record of one run; reproducible bit-for-bit from the seed."""

    output_point: tuple
    output_index: int
    iterations: int
    step_size: float
    total_comparisons: int
    mean_cost_per_iteration: float
    stationarity_estimate: float
    stationarity_se: float
    iterate_trace: tuple
    config_echo: dict = field(repr=False)


def step_size_plan(lipschitz_l: float, d: int, delta: float, iterations: int,
                   initial_gap_bound: float, variance_constant: float) -> float:
    """eta = min{ delta/(L sqrt(d)),
                  sqrt(2*Delta0 / (L_delta * T * (d^2/4delta^2) * C * B^2)) }

    with L_delta = L sqrt(d)/delta the smoothed objective's smoothness and
    B = 2 L delta the per-query gap bound.
    """
    if not all(v > 0 for v in (lipschitz_l, d, delta, iterations,
                               initial_gap_bound, variance_constant)):
        raise ValueError("all step-size plan inputs must be positive")
    smoothness = lipschitz_l * math.sqrt(d) / delta
    cap = 1.0 / smoothness
    gap_bound = 2.0 * lipschitz_l * delta
    variance_term = (d * d / (4.0 * delta * delta)) * variance_constant * gap_bound * gap_bound
    tuned = math.sqrt(2.0 * initial_gap_bound / (smoothness * iterations * variance_term))
    return min(cap, tuned)


def iteration_budget(lipschitz_l: float, d: int, delta: float, epsilon: float,
                     initial_gap_bound: float, variance_constant: float) -> int:
    """T = ceil(8 * C * d^(5/2) * L^3 * Delta0 / (delta * epsilon^4)),
    enough for the expected smoothed-gradient norm at the random output
    index to drop below epsilon."""
    if not all(v > 0 for v in (lipschitz_l, d, delta, epsilon,
                               initial_gap_bound, variance_constant)):
        raise ValueError("all budget inputs must be positive")
    real = (8.0 * variance_constant * d ** 2.5 * lipschitz_l ** 3
            * initial_gap_bound / (delta * epsilon ** 4))
    if not math.isfinite(real) or real > _MAX_BUDGET:
        raise BudgetError(f"iteration budget {real:.6g} exceeds the integer range", real)
    return max(1, int(math.ceil(real)))


def resolve_params(objective, sgd: SGDParams) -> tuple[float, int]:
    """Resolve 'auto' step size / iteration count against the objective."""
    lipschitz_l = objective.lipschitz_constant
    d = objective.dimension
    if sgd.iterations == AUTO:
        iterations = iteration_budget(lipschitz_l, d, sgd.delta, sgd.epsilon_target,
                                      sgd.initial_gap_bound, sgd.variance_constant)
    else:
        iterations = int(sgd.iterations)
    if sgd.eta == AUTO:
        eta = step_size_plan(lipschitz_l, d, sgd.delta, iterations,
                             sgd.initial_gap_bound, sgd.variance_constant)
    else:
        eta = float(sgd.eta)
        cap = sgd.delta / (lipschitz_l * math.sqrt(d))
        if eta > cap * (1.0 + 1e-12):
            raise ValueError(
                f"eta={eta:.6g} exceeds the smoothness cap delta/(L sqrt(d))={cap:.6g}"
            )
    return eta, iterations


def run(objective, link, sgd: SGDParams, estimator_config: EstimatorConfig,
        x0, *, diagnostic_samples: int = 10**5) -> RunReport:
    """Execute comparison-SGD and report the randomized output point.

    All randomness derives from sgd.seed: the oracle, the algorithm stream
    (directions and truncations), the output index, and the post-hoc
    diagnostic each use their own sub-stream.  The stationarity diagnostic
    relies on direct objective values (simulation privilege) and never
    feeds back into the run; the oracle counter covers comparisons only.
    """
    x = np.asarray(x0, dtype=float).copy()
    d = objective.dimension
    if x.shape != (d,):
        raise ValueError(f"x0 must have shape ({d},)")
    eta, iterations = resolve_params(objective, sgd)
    params = SmoothingParams(delta=sgd.delta, dimension=d)

    oracle = ComparisonOracle(objective, link, rng=make_rng(sgd.seed, _STREAM_ORACLE))
    algo_rng = make_rng(sgd.seed, _STREAM_ALGORITHM)
    output_index = int(make_rng(sgd.seed, _STREAM_OUTPUT_INDEX).integers(iterations))

    stride = max(1, math.ceil(iterations / sgd.trace_points))
    trace = []
    output_point = x.copy()  # R = 0 outputs the initial point

    for t in range(iterations):
        if t == output_index:
            output_point = x.copy()
        if t % stride == 0:
            trace.append((t, tuple(float(v) for v in x)))
        sample = gradient_sample(estimator_config, oracle, x, params, algo_rng)
        if not np.all(np.isfinite(sample.vector)):
            raise RunDivergedError(
                f"non-finite gradient sample at iteration {t}", x.copy(), t)
        x = x - eta * sample.vector
        if not np.all(np.isfinite(x)):
            raise RunDivergedError(
                f"iterate diverged at iteration {t}", output_point, t)

    diag = reference_smoothed_gradient(
        objective, output_point, params, diagnostic_samples,
        make_rng(sgd.seed, _STREAM_DIAGNOSTIC))
    norm = float(np.linalg.norm(diag.vector))
    norm_se = float(np.linalg.norm(diag.standard_error))

    total = oracle.query_count
    echo = {
        "objective": getattr(objective, "name", type(objective).__name__),
        "dimension": d,
        "lipschitz_constant": objective.lipschitz_constant,
        "link": link.kind,
        "tau": link.tau,
        "delta": sgd.delta,
        "epsilon_target": sgd.epsilon_target,
        "eta": eta,
        "iterations": iterations,
        "initial_gap_bound": sgd.initial_gap_bound,
        "variance_constant": sgd.variance_constant,
        "beta": estimator_config.schedule.beta,
        "estimator_path": estimator_config.path,
        "predicted_cost_per_iteration": predicted_cost(
            estimator_config.schedule, estimator_config.path),
        "seed": sgd.seed,
    }
    return RunReport(
        output_point=tuple(float(v) for v in output_point),
        output_index=output_index,
        iterations=iterations,
        step_size=eta,
        total_comparisons=total,
        mean_cost_per_iteration=total / iterations,
        stationarity_estimate=norm,
        stationarity_se=norm_se,
        iterate_trace=tuple(trace),
        config_echo=echo,
    )
