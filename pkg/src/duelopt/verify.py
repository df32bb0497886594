"""Statistical harness: every quantitative claim becomes a seeded,
reproducible pass/fail Monte Carlo check.

Tolerance philosophy: 4-sigma CLT bands for unbiasedness-style checks and
2% relative bands for expected costs.  With the suite's check count the
union bound keeps the false-alarm probability of a full run under 1%, and
since every check is seeded, a suite that passes once passes forever on
the same platform.

Targets never come from comparison outcomes: they are closed forms
(provenance "closed-form") or privileged value-based Monte Carlo
(provenance "mc-oracle").

Replicates are simulated in fixed-size chunks, each chunk on its own
derived sub-stream, and chunk partials are reduced in index order with
compensated summation — so results are bit-identical for any worker
count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import optimizer
from .errors import ValidityError
from .estimator import (
    PATH_GENERAL,
    PATH_LOGISTIC,
    EstimatorConfig,
    TruncationSchedule,
    default_beta,
    predicted_cost,
    sample_truncations,
    simulate_gap_values,
)
from .links import (
    BASIS_ODD_DEGREES,
    LOGISTIC,
    CoefficientSeries,
    LinkSpec,
    OperatedInterval,
    fit_odd_coefficients,
    interval_for_gap_bound,
    logistic_coefficients,
    sigma,
)
from .objectives import Abs1D, SmoothQuadratic
from .oracle import ComparisonOracle
from .seeding import make_rng
from .smoothing import SmoothingParams, sample_sphere_batch

CHUNK = 1 << 15

RULE_FOUR_SIGMA = "four-sigma"
RULE_RELATIVE_PERCENT = "relative-percent"
RULE_SLOPE_WINDOW = "slope-window"
RULE_UPPER_CONFIDENCE = "upper-confidence"
RULE_THRESHOLD = "threshold"

PROVENANCE_FORMULA = "closed-form"
PROVENANCE_MC = "mc-oracle"

# sub-stream labels (first path element after the master seed)
_CTX_UNBIASED = 11
_CTX_COST = 12
_CTX_SECOND_MOMENT = 13
_CTX_SERIES_BOUNDS = 14
_CTX_GRADIENT = 15
_CTX_GOLDSTEIN = 16
_CTX_SGD_AUDIT = 17


@dataclass(frozen=True)
class MonteCarloCheck:
    """One report row.  ``passed`` is a pure function of the statistical
    fields (see evaluate_rule); ``extra`` carries side products such as
    certified constants and never affects the verdict."""

    name: str
    replicates_n: int
    point_estimate: float
    standard_error: float
    target: float
    rule: str
    rule_params: tuple = ()
    bias_allowance: float = 0.0
    provenance: str = PROVENANCE_FORMULA
    passed: bool = True
    extra: dict = field(default_factory=dict, repr=False)


def evaluate_rule(rule: str, estimate: float, se: float, target: float,
                  params: tuple = (), bias: float = 0.0) -> bool:
    """Verdict for a check row; keep in sync with MonteCarloCheck fields."""
    if rule == RULE_FOUR_SIGMA:
        return bool(abs(estimate - target) <= 4.0 * se + bias)
    if rule == RULE_RELATIVE_PERCENT:
        (pct,) = params
        return bool(abs(estimate - target) <= (pct / 100.0) * abs(target))
    if rule == RULE_SLOPE_WINDOW:
        lo, hi = params
        return bool(lo <= estimate <= hi)
    if rule == RULE_UPPER_CONFIDENCE:
        return bool(estimate <= target + 4.0 * se + bias)
    if rule == RULE_THRESHOLD:
        return bool(estimate <= target)
    raise ValueError(f"unknown tolerance rule {rule!r}")


def make_check(name: str, n: int, estimate: float, se: float, target: float,
               rule: str, params: tuple = (), bias: float = 0.0,
               provenance: str = PROVENANCE_FORMULA, extra: dict | None = None) -> MonteCarloCheck:
    return MonteCarloCheck(
        name=name, replicates_n=int(n), point_estimate=float(estimate),
        standard_error=float(se), target=float(target), rule=rule,
        rule_params=tuple(params), bias_allowance=float(bias), provenance=provenance,
        passed=evaluate_rule(rule, estimate, se, target, tuple(params), bias),
        extra=dict(extra or {}),
    )


def neumaier_sum(values) -> float:
    """Compensated summation in the given order (reduction determinism)."""
    total = 0.0
    comp = 0.0
    for v in values:
        v = float(v)
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
    return total + comp


def _parallel_chunks(task, n: int, workers: int) -> list:
    """Run task(chunk_index, chunk_size) for fixed-size chunks, returning
    partials in chunk order regardless of worker count."""
    sizes = [(i, min(CHUNK, n - i * CHUNK)) for i in range((n + CHUNK - 1) // CHUNK)]
    if workers <= 1:
        return [task(i, s) for i, s in sizes]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(task, i, s) for i, s in sizes]
        return [f.result() for f in futures]


def _reduce_columns(partials: list) -> np.ndarray:
    cols = np.asarray(partials, dtype=float)
    return np.array([neumaier_sum(cols[:, j]) for j in range(cols.shape[1])])


@dataclass(frozen=True)
class MomentSummary:
    n: int
    mean: float
    se: float
    mean_sq: float
    se_sq: float
    mean_cost: float
    se_cost: float


def _gap_moments(link: LinkSpec, series: CoefficientSeries, schedule: TruncationSchedule,
                 win_prob: float, n: int, seed: int, ctx: tuple, workers: int) -> MomentSummary:
    def task(ci: int, size: int):
        rng = make_rng(seed, *ctx, ci)
        values, costs = simulate_gap_values(link, series, schedule, np.full(size, win_prob), rng)
        costs = costs.astype(np.float64)
        return (values.sum(), (values ** 2).sum(), (values ** 4).sum(),
                costs.sum(), (costs ** 2).sum(), float(size))

    sums = _reduce_columns(_parallel_chunks(task, n, workers))
    s1, s2, s4, c1, c2, count = sums
    mean = s1 / count
    var = max((s2 - count * mean * mean) / (count - 1), 0.0)
    mean_sq = s2 / count
    var_sq = max((s4 - count * mean_sq * mean_sq) / (count - 1), 0.0)
    mean_cost = c1 / count
    var_cost = max((c2 - count * mean_cost * mean_cost) / (count - 1), 0.0)
    return MomentSummary(
        n=int(count), mean=mean, se=math.sqrt(var / count),
        mean_sq=mean_sq, se_sq=math.sqrt(var_sq / count),
        mean_cost=mean_cost, se_cost=math.sqrt(var_cost / count),
    )


# ---------------------------------------------------------------------------
# Lemma-level checks
# ---------------------------------------------------------------------------

def check_unbiasedness(link: LinkSpec, series: CoefficientSeries,
                       schedule: TruncationSchedule, gap_grid, n: int, seed: int,
                       workers: int = 1, name_prefix: str = "unbiasedness") -> list:
    """mean(gap_hat) vs the true gap at each grid point, 4-sigma bands.

    Fitted-series paths add the deterministic bias allowance
    tau * sup_residual.
    """
    interval = series.fit_interval
    config = EstimatorConfig(link=link, series=series, schedule=schedule, interval=interval)
    bias = link.tau * series.sup_residual if config.path == PATH_GENERAL else 0.0
    checks = []
    for j, gap in enumerate(gap_grid):
        if abs(gap) > interval.gap_bound * (1 + 1e-12):
            raise ValueError(f"grid gap {gap} exceeds the operated bound {interval.gap_bound}")
        win = sigma(link, gap)
        mom = _gap_moments(link, series, schedule, win, n, seed, (_CTX_UNBIASED, j), workers)
        checks.append(make_check(
            f"{name_prefix}/{link.kind}/gap={gap:+g}", mom.n, mom.mean, mom.se,
            float(gap), RULE_FOUR_SIGMA, bias=bias, provenance=PROVENANCE_FORMULA,
            extra={"sd": mom.se * math.sqrt(mom.n), "mean_cost": mom.mean_cost},
        ))
    return checks


def check_cost(schedule: TruncationSchedule, path: str, n: int, seed: int,
               workers: int = 1, name_prefix: str = "cost") -> MonteCarloCheck:
    """Empirical mean comparisons per estimate within 2% of the formula."""
    target = predicted_cost(schedule, path)

    def task(ci: int, size: int):
        rng = make_rng(seed, _CTX_COST, ci)
        trunc = sample_truncations(schedule, size, rng)
        if path == PATH_LOGISTIC:
            costs = (trunc * (trunc + 1) // 2).astype(np.float64)
        else:
            costs = (trunc * trunc).astype(np.float64)
        return (costs.sum(), (costs ** 2).sum(), float(size))

    c1, c2, count = _reduce_columns(_parallel_chunks(task, n, workers))
    mean = c1 / count
    var = max((c2 - count * mean * mean) / (count - 1), 0.0)
    return make_check(
        f"{name_prefix}/{path}/beta={schedule.beta:g}", int(count), mean,
        math.sqrt(var / count), target, RULE_RELATIVE_PERCENT, params=(2.0,),
        provenance=PROVENANCE_FORMULA,
    )


def check_second_moment_scaling(link_kind: str, gap_bounds, n: int, seed: int,
                                workers: int = 1, tau_ratio: float = 0.5,
                                series_tolerance: float = 1e-8,
                                max_terms: int = 160,
                                name_prefix: str = "second-moment") -> MonteCarloCheck:
    """log-log slope of E[gap_hat^2] against the gap bound B, measured at
    the worst-case gap = B with tau = tau_ratio * B.

    With tau proportional to B the operated interval is the same for the
    whole grid, so one beta (the default rule at the largest B) is valid
    everywhere.  Emits the certified constant C = max E[gap_hat^2] / B^2
    in ``extra["c_delta"]`` for downstream variance accounting;
    note this grid maximum is a lower bound on the true uniform constant.

    A fixed tau (violating tau ~ B) makes E[gap_hat^2]/B^2 blow up as
    B -> 0; that negative control is exercised in the test suite, not
    asserted here.
    """
    gap_bounds = sorted(float(b) for b in gap_bounds)
    if len(gap_bounds) < 4:
        raise ValueError("need at least 4 grid points for a slope estimate")
    largest = gap_bounds[-1]
    link_big = LinkSpec(kind=link_kind, tau=tau_ratio * largest)
    interval_big = interval_for_gap_bound(link_big, largest)

    series_big = None
    if link_kind != LOGISTIC:
        series_big = fit_odd_coefficients(link_big, interval_big, series_tolerance, max_terms)
    beta = default_beta(interval_big, series_big)
    schedule = TruncationSchedule(beta=beta)

    log_b, log_m2, se_log = [], [], []
    c_delta = 0.0
    for j, bound in enumerate(gap_bounds):
        link = LinkSpec(kind=link_kind, tau=tau_ratio * bound)
        interval = interval_for_gap_bound(link, bound)
        if link_kind == LOGISTIC:
            series = logistic_coefficients(200, interval)
        else:
            # same probability interval for every B: reuse the fit
            series = CoefficientSeries(
                basis=series_big.basis, coefficients=series_big.coefficients,
                fit_interval=interval, sup_residual=series_big.sup_residual,
                decay_c=series_big.decay_c, decay_rho=series_big.decay_rho)
        EstimatorConfig(link=link, series=series, schedule=schedule, interval=interval)
        win = sigma(link, bound)
        mom = _gap_moments(link, series, schedule, win, n, seed, (_CTX_SECOND_MOMENT, j), workers)
        log_b.append(math.log(bound))
        log_m2.append(math.log(mom.mean_sq))
        se_log.append(mom.se_sq / mom.mean_sq)
        c_delta = max(c_delta, mom.mean_sq / (bound * bound))

    x = np.asarray(log_b)
    y = np.asarray(log_m2)
    xc = x - x.mean()
    denom = float((xc ** 2).sum())
    slope = float((xc * y).sum() / denom)
    slope_se = math.sqrt(float((xc ** 2 * np.asarray(se_log) ** 2).sum()) / denom ** 2)
    return make_check(
        f"{name_prefix}/{link_kind}/slope", n * len(gap_bounds), slope, slope_se,
        2.0, RULE_SLOPE_WINDOW, params=(1.8, 2.2), provenance=PROVENANCE_FORMULA,
        extra={"c_delta": c_delta, "beta": beta},
    )


def _logistic_moment_series(alpha: float, beta: float):
    """T2 = sum 2 alpha^m / (m^2 beta^(m-1)), T1 = same with 1/m; the
    geometric ratio alpha/beta < 1 guarantees convergence."""
    ratio = alpha / beta
    t1 = t2 = 0.0
    term_base = 2.0 * alpha  # m = 1 value of 2 alpha^m / beta^(m-1)
    m = 1
    while True:
        t1 += term_base / m
        t2 += term_base / (m * m)
        term_base *= ratio
        m += 1
        if term_base / m < 1e-17 * max(t1, 1.0) or m > 100_000:
            break
    return t1, t2


def check_series_bounds(series: CoefficientSeries, interval: OperatedInterval,
                        schedule: TruncationSchedule, link: LinkSpec,
                        n: int, seed: int, workers: int = 1,
                        name_prefix: str = "series-bounds") -> list:
    """Finiteness of the variance series and the explicit second-moment
    bound E[gap_hat^2] <= B^2 + variance bound, checked empirically at the
    worst-case gap."""
    alpha = interval.alpha
    beta = schedule.beta
    tau = link.tau
    k = np.arange(1, series.num_terms + 1, dtype=float)
    if series.basis == BASIS_ODD_DEGREES:
        tail_ratio = alpha * alpha * series.decay_rho ** 2 / beta
        coef = np.asarray(series.coefficients)
        surv = beta ** (k - 1.0)
        s2 = float(np.sum(coef ** 2 / surv * alpha ** (2.0 * k - 1.0)))
        s1 = float(np.sum(np.abs(coef) / np.sqrt(surv) * alpha ** (k - 0.5)))
        var_bound = 2.0 * tau * tau * (s2 + s1 * s1)
        path = PATH_GENERAL
    else:
        tail_ratio = alpha / beta
        t1, t2 = _logistic_moment_series(alpha, beta)
        s1, s2 = t1, t2
        var_bound = tau * tau * (t2 + t1 * t1)
        path = PATH_LOGISTIC
    if tail_ratio >= 1.0:
        raise ValidityError(
            f"variance series diverges: tail ratio {tail_ratio:.6g} >= 1")

    bound = interval.gap_bound ** 2 + var_bound
    win = sigma(link, interval.gap_bound)
    mom = _gap_moments(link, series, schedule, win, n, seed, (_CTX_SERIES_BOUNDS, 0), workers)
    return [
        make_check(f"{name_prefix}/{link.kind}/tail-ratio", 0, tail_ratio, 0.0, 1.0,
                   RULE_THRESHOLD, provenance=PROVENANCE_FORMULA,
                   extra={"s1": s1, "s2": s2}),
        make_check(f"{name_prefix}/{link.kind}/second-moment-bound", mom.n, mom.mean_sq,
                   mom.se_sq, bound, RULE_UPPER_CONFIDENCE, provenance=PROVENANCE_FORMULA,
                   extra={"path": path, "variance_bound": var_bound}),
    ]


def check_gradient_unbiasedness(objective, config: EstimatorConfig, points,
                                params: SmoothingParams, n: int, seed: int,
                                workers: int = 1,
                                name_prefix: str = "gradient") -> list:
    """Componentwise 4-sigma agreement of the mean comparison-based
    gradient sample with the smoothed gradient at each point.

    The target is the objective's closed-form smoothed gradient when it
    has one, otherwise a value-based Monte Carlo reference whose standard
    error widens the band.
    """
    d = params.dimension
    delta = params.delta
    link, series, schedule = config.link, config.series, config.schedule
    scale = d / (2.0 * delta)
    bias = scale * link.tau * series.sup_residual if config.path == PATH_GENERAL else 0.0

    checks = []
    for j, point in enumerate(points):
        x = np.asarray(point, dtype=float)

        def task(ci: int, size: int, x=x):
            rng = make_rng(seed, _CTX_GRADIENT, j, ci)
            dirs = sample_sphere_batch(d, size, rng)
            gaps = objective.values(x + delta * dirs) - objective.values(x - delta * dirs)
            values, _ = simulate_gap_values(link, series, schedule, sigma(link, gaps), rng)
            g = scale * values[:, None] * dirs
            return np.concatenate([g.sum(axis=0), (g ** 2).sum(axis=0), [float(size)]])

        sums = _reduce_columns(_parallel_chunks(task, n, workers))
        g1, g2, count = sums[:d], sums[d:2 * d], sums[-1]
        mean = g1 / count
        var = np.maximum((g2 - count * mean ** 2) / (count - 1), 0.0)
        se = np.sqrt(var / count)

        if hasattr(objective, "smoothed_gradient"):
            target = objective.smoothed_gradient(x, delta)
            target_se = np.zeros(d)
            provenance = PROVENANCE_FORMULA
        else:
            from .smoothing import reference_smoothed_gradient
            ref = reference_smoothed_gradient(objective, x, params, n,
                                              make_rng(seed, _CTX_GRADIENT, j, 999_983))
            target = ref.vector
            target_se = ref.standard_error
            provenance = PROVENANCE_MC

        for comp in range(d):
            combined = math.sqrt(se[comp] ** 2 + target_se[comp] ** 2)
            label = f"{name_prefix}/{getattr(objective, 'name', 'objective')}/p{j}" + (
                f"/x{comp}" if d > 1 else "")
            checks.append(make_check(
                label, int(count), mean[comp], combined, target[comp],
                RULE_FOUR_SIGMA, bias=bias, provenance=provenance))
    return checks


# ---------------------------------------------------------------------------
# Composite end-to-end checks
# ---------------------------------------------------------------------------

def _parallel_seeds(fn, n_seeds: int, workers: int) -> list:
    if workers <= 1:
        return [fn(i) for i in range(n_seeds)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, i) for i in range(n_seeds)]
        return [f.result() for f in futures]


def check_goldstein_run(seed: int, c_delta: float, n_seeds: int = 20,
                        workers: int = 1, epsilon: float = 0.3,
                        delta: float = 0.1, tau: float = 0.1,
                        name_prefix: str = "goldstein") -> list:
    """End-to-end run on |x|: auto step size and budget must drive the
    value-based stationarity certificate below epsilon, at the predicted
    comparison cost."""
    objective = Abs1D()
    link = LinkSpec(kind=LOGISTIC, tau=tau)
    interval = interval_for_gap_bound(link, 2.0 * objective.lipschitz_constant * delta)
    schedule = TruncationSchedule(beta=default_beta(interval))
    series = logistic_coefficients(200, interval)
    config = EstimatorConfig(link=link, series=series, schedule=schedule, interval=interval)

    def one_run(i: int):
        sgd = optimizer.SGDParams(
            delta=delta, epsilon_target=epsilon, eta=optimizer.AUTO,
            iterations=optimizer.AUTO, initial_gap_bound=1.0,
            variance_constant=c_delta,
            seed=int(make_rng(seed, _CTX_GOLDSTEIN, i).integers(2**62)),
        )
        return optimizer.run(objective, link, sgd, config, np.array([1.0]))

    reports = _parallel_seeds(one_run, n_seeds, workers)
    norms = np.array([r.stationarity_estimate for r in reports])
    norm_ses = np.array([r.stationarity_se for r in reports])
    mean_norm = float(norms.mean())
    se_norm = math.sqrt(norms.var(ddof=1) / n_seeds + float((norm_ses ** 2).mean()) / n_seeds)

    iterations = reports[0].iterations
    per_run = np.array([r.total_comparisons for r in reports], dtype=float)
    budget = iterations * predicted_cost(schedule, PATH_LOGISTIC) * 1.02
    return [
        make_check(f"{name_prefix}/stationarity-mean", n_seeds, mean_norm, se_norm,
                   epsilon, RULE_UPPER_CONFIDENCE, provenance=PROVENANCE_MC,
                   extra={"iterations": iterations, "eta": reports[0].step_size,
                          "per_seed_norms": [float(v) for v in norms]}),
        make_check(f"{name_prefix}/comparison-budget", n_seeds, float(per_run.mean()),
                   float(per_run.std(ddof=1) / math.sqrt(n_seeds)), budget,
                   RULE_THRESHOLD, provenance=PROVENANCE_FORMULA,
                   extra={"predicted_per_iteration": predicted_cost(schedule, PATH_LOGISTIC)}),
    ]


def check_sgd_descent_bound(seed: int, n_seeds: int = 20, workers: int = 1,
                            iterations: int = 1000, delta: float = 0.5,
                            name_prefix: str = "sgd-bound") -> MonteCarloCheck:
    """Audit of the descent inequality on the smooth quadratic control:

        (1/T) sum_t E||grad F(x_t)||^2 <= 2*Delta0/(eta*T) + eta*L_F*V

    with F the smoothed quadratic (grad F(x) = x exactly, L_F = 1,
    Delta0 = ||x0||^2/2 exactly) and V the measured mean ||G_t||^2.
    """
    objective = SmoothQuadratic(2, box_radius=6.0)
    x0 = np.array([3.0, 4.0])
    gap_bound = 2.0 * objective.lipschitz_constant * delta
    link = LinkSpec(kind=LOGISTIC, tau=gap_bound / 2.0)
    interval = interval_for_gap_bound(link, gap_bound)
    schedule = TruncationSchedule(beta=default_beta(interval))
    series = logistic_coefficients(200, interval)
    config = EstimatorConfig(link=link, series=series, schedule=schedule, interval=interval)
    delta0 = float(0.5 * (x0 @ x0))

    def one_run(i: int):
        sgd = optimizer.SGDParams(
            delta=delta, epsilon_target=1.0, eta=optimizer.AUTO,
            iterations=iterations, initial_gap_bound=delta0,
            variance_constant=1.5, trace_points=iterations,
            seed=int(make_rng(seed, _CTX_SGD_AUDIT, i).integers(2**62)),
        )
        report = optimizer.run(objective, link, sgd, config, x0,
                               diagnostic_samples=1000)
        iterates = np.array([pt for _, pt in report.iterate_trace])
        lhs = float(np.mean(np.einsum("ij,ij->i", iterates, iterates)))
        steps = np.diff(iterates, axis=0) / report.step_size
        mean_g_sq = float(np.mean(np.einsum("ij,ij->i", steps, steps)))
        return lhs, mean_g_sq, report.step_size

    results = _parallel_seeds(one_run, n_seeds, workers)
    lhs_values = np.array([r[0] for r in results])
    v_measured = float(np.mean([r[1] for r in results]))
    eta = results[0][2]
    smoothness_f = 1.0  # exact Hessian of the smoothed quadratic
    rhs = 2.0 * delta0 / (eta * iterations) + eta * smoothness_f * v_measured
    return make_check(
        f"{name_prefix}/quadratic", n_seeds, float(lhs_values.mean()),
        float(lhs_values.std(ddof=1) / math.sqrt(n_seeds)), rhs,
        RULE_UPPER_CONFIDENCE, provenance=PROVENANCE_MC,
        extra={"eta": eta, "v_measured": v_measured, "delta0": delta0},
    )


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------

def _standard_setup(kind: str, tau: float = 0.5, gap_bound: float = 1.0,
                    tolerance: float = 1e-8, max_terms: int = 160):
    """Link, interval, series and default schedule for the B/tau = 2
    reference regime used throughout the suites."""
    link = LinkSpec(kind=kind, tau=tau)
    interval = interval_for_gap_bound(link, gap_bound)
    if kind == LOGISTIC:
        series = logistic_coefficients(200, interval)
        schedule = TruncationSchedule(beta=default_beta(interval))
    else:
        series = fit_odd_coefficients(link, interval, tolerance, max_terms)
        schedule = TruncationSchedule(beta=default_beta(interval, series))
    return link, interval, series, schedule


def core_suite(seed: int, n: int = 200_000, workers: int = 1) -> list:
    """Fast lemma-level sweep (~33 rows) for the CLI ``verify`` command.

    All rows use 4-sigma or 2% bands; by the union bound the suite
    false-alarm rate stays below 1%.
    """
    checks = []
    grid = (-1.0, -0.5, 0.0, 0.5, 1.0)
    for kind in (LOGISTIC, "probit", "cauchit"):
        link, interval, series, schedule = _standard_setup(kind)
        checks.extend(check_unbiasedness(link, series, schedule, grid, n, seed, workers))
    for beta in (0.5, 0.8, 0.9):
        for path in (PATH_LOGISTIC, PATH_GENERAL):
            checks.append(check_cost(TruncationSchedule(beta=beta), path, n, seed, workers))
    checks.append(check_second_moment_scaling(
        LOGISTIC, (0.1, 0.2, 0.4, 0.8), n, seed, workers))
    for kind in (LOGISTIC, "cauchit"):
        link, interval, series, schedule = _standard_setup(kind)
        checks.extend(check_series_bounds(series, interval, schedule, link, n, seed, workers))

    delta = 0.1
    link, interval, series, schedule = _standard_setup(LOGISTIC, tau=delta, gap_bound=2 * delta)
    config = EstimatorConfig(link=link, series=series, schedule=schedule, interval=interval)
    checks.extend(check_gradient_unbiasedness(
        Abs1D(), config, [np.array([0.0]), np.array([0.05]), np.array([0.15])],
        SmoothingParams(delta=delta, dimension=1), min(n, 100_000), seed, workers))

    quad = SmoothQuadratic(2, box_radius=3.0)
    delta_q = 0.25
    bound_q = 2.0 * quad.lipschitz_constant * delta_q
    link_q = LinkSpec(kind=LOGISTIC, tau=bound_q / 2.0)
    interval_q = interval_for_gap_bound(link_q, bound_q)
    series_q = logistic_coefficients(200, interval_q)
    config_q = EstimatorConfig(link=link_q, series=series_q,
                               schedule=TruncationSchedule(beta=default_beta(interval_q)),
                               interval=interval_q)
    checks.extend(check_gradient_unbiasedness(
        quad, config_q, [np.array([1.0, -0.5]), np.array([0.0, 2.0])],
        SmoothingParams(delta=delta_q, dimension=2), min(n, 100_000), seed, workers))
    return checks


def acceptance_criteria(seed: int, workers: int = 1, n: int = 10**6) -> list:
    """The full acceptance battery, grouped per criterion.

    Returns [(criterion_label, [checks], elapsed_seconds), ...]; the
    certified variance constant from the scaling criterion feeds the
    end-to-end run."""
    import time as _time

    groups = []

    def grouped(label, builder):
        start = _time.perf_counter()
        rows = builder()
        groups.append((label, rows, _time.perf_counter() - start))
        return rows

    grid = (-1.0, -0.5, 0.0, 0.5, 1.0)

    def c1():
        link, interval, series, schedule = _standard_setup(LOGISTIC)
        return check_unbiasedness(link, series, schedule, grid, n, seed, workers,
                                  name_prefix="c1/unbiasedness")

    grouped("c1 unbiasedness (logistic)", c1)

    def c2():
        rows = []
        for kind in ("probit", "cauchit"):
            link, interval, series, schedule = _standard_setup(kind)
            rows.extend(check_unbiasedness(link, series, schedule, grid, n, seed,
                                           workers, name_prefix="c2/unbiasedness"))
        return rows

    grouped("c2 unbiasedness (general links)", c2)

    def c3():
        return [check_cost(TruncationSchedule(beta=beta), path, n, seed, workers,
                           name_prefix="c3/cost")
                for beta in (0.5, 0.8, 0.9)
                for path in (PATH_LOGISTIC, PATH_GENERAL)]

    grouped("c3 expected cost", c3)

    scaling_rows = grouped("c4 second-moment scaling", lambda: [
        check_second_moment_scaling(LOGISTIC, (0.1, 0.2, 0.4, 0.8), n, seed,
                                    workers, name_prefix="c4/second-moment")])
    c_delta = scaling_rows[0].extra["c_delta"]

    def c5():
        rows = []
        delta = 0.1
        link, interval, series, schedule = _standard_setup(
            LOGISTIC, tau=delta, gap_bound=2 * delta)
        config = EstimatorConfig(link=link, series=series, schedule=schedule,
                                 interval=interval)
        abs_points = [np.array([x]) for x in np.linspace(-0.3, 0.3, 10)]
        rows.extend(check_gradient_unbiasedness(
            Abs1D(), config, abs_points, SmoothingParams(delta=delta, dimension=1),
            100_000, seed, workers, name_prefix="c5/gradient"))

        quad = SmoothQuadratic(2, box_radius=3.0)
        delta_q = 0.25
        bound_q = 2.0 * quad.lipschitz_constant * delta_q
        link_q = LinkSpec(kind=LOGISTIC, tau=bound_q / 2.0)
        interval_q = interval_for_gap_bound(link_q, bound_q)
        config_q = EstimatorConfig(
            link=link_q, series=logistic_coefficients(200, interval_q),
            schedule=TruncationSchedule(beta=default_beta(interval_q)),
            interval=interval_q)
        rng_pts = make_rng(seed, _CTX_GRADIENT, 424242)
        quad_points = [rng_pts.uniform(-2.0, 2.0, 2) for _ in range(10)]
        rows.extend(check_gradient_unbiasedness(
            quad, config_q, quad_points, SmoothingParams(delta=delta_q, dimension=2),
            100_000, seed, workers, name_prefix="c5/gradient"))
        return rows

    grouped("c5 gradient unbiasedness", c5)

    def c6():
        rows = []
        for kind in ("probit", "cauchit"):
            link = LinkSpec(kind=kind, tau=0.5)
            interval = interval_for_gap_bound(link, 1.0)
            series = fit_odd_coefficients(link, interval, 1e-8, 160)
            rows.append(make_check(
                f"c6/coeffs/{kind}/sup-residual", 0, series.sup_residual, 0.0, 1e-8,
                RULE_THRESHOLD, provenance=PROVENANCE_FORMULA,
                extra={"terms": series.num_terms, "decay_c": series.decay_c}))
            rows.append(make_check(
                f"c6/coeffs/{kind}/decay-rho", 0, series.decay_rho, 0.0, 1.0,
                RULE_THRESHOLD, provenance=PROVENANCE_FORMULA))
        return rows

    grouped("c6 coefficient engine", c6)

    grouped("c7 end-to-end stationarity", lambda: check_goldstein_run(
        seed, c_delta, n_seeds=20, workers=workers, name_prefix="c7/goldstein"))
    grouped("c8 descent bound audit", lambda: [check_sgd_descent_bound(
        seed, n_seeds=20, workers=workers, name_prefix="c8/sgd-bound")])
    return groups


def acceptance_suite(seed: int, workers: int = 1, n: int = 10**6) -> list:
    """Flat list of all acceptance check rows."""
    return [row for _, rows, _ in acceptance_criteria(seed, workers, n) for row in rows]
