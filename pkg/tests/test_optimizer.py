import math

import numpy as np
import pytest

from duelopt import (
    Abs1D,
    BudgetError,
    EstimatorConfig,
    LinkSpec,
    RunDivergedError,
    SGDParams,
    SmoothQuadratic,
    TruncationSchedule,
    default_beta,
    interval_for_gap_bound,
    iteration_budget,
    logistic_coefficients,
    predicted_cost,
    run,
    step_size_plan,
)


class TestStepSizePlan:
    def test_cap_term(self):
        # smoothness cap delta / (L sqrt(d))
        assert step_size_plan(1.0, 1, 1.0, 10**9, 1.0, 1.0) == pytest.approx(
            math.sqrt(2 / (1 * 10**9 * 0.25 * 4)))
        assert step_size_plan(1.0, 4, 0.5, 1, 100.0, 1e-6) == pytest.approx(0.25)

    def test_tuned_term(self):
        # L=1, d=1, delta=1, Delta0=1, C=1, T=8:
        # sqrt(2 / (1*8*(1/4)*1*4)) = 0.5 and the cap is 1
        assert step_size_plan(1.0, 1, 1.0, 8, 1.0, 1.0) == pytest.approx(0.5)

    def test_min_of_both(self):
        eta = step_size_plan(1.0, 1, 1.0, 2, 1.0, 1.0)
        assert eta == pytest.approx(1.0)  # tuned term would exceed the cap


class TestIterationBudget:
    def test_all_ones(self):
        assert iteration_budget(1.0, 1, 1.0, 1.0, 1.0, 1.0) == 8

    def test_epsilon_scaling(self):
        assert iteration_budget(1.0, 1, 1.0, 0.5, 1.0, 1.0) == 128

    def test_dimension_scaling(self):
        assert iteration_budget(1.0, 4, 1.0, 1.0, 1.0, 1.0) == 8 * 32

    def test_overflow(self):
        with pytest.raises(BudgetError) as err:
            iteration_budget(1.0, 1, 1.0, 1e-6, 1e6, 1e6)
        assert err.value.real_budget > 2**63


def _abs_config(tau=0.1, delta=0.1):
    link = LinkSpec(kind="logistic", tau=tau)
    interval = interval_for_gap_bound(link, 2 * delta)
    series = logistic_coefficients(200, interval)
    schedule = TruncationSchedule(beta=default_beta(interval))
    return link, EstimatorConfig(link=link, series=series, schedule=schedule,
                                 interval=interval)


class TestRun:
    def test_report_fields_and_accounting(self):
        link, config = _abs_config()
        sgd = SGDParams(delta=0.1, epsilon_target=0.5, iterations=500, seed=3,
                        variance_constant=1.3)
        report = run(Abs1D(), link, sgd, config, np.array([0.5]),
                     diagnostic_samples=2000)
        assert report.iterations == 500
        assert 0 <= report.output_index < 500
        assert report.total_comparisons > 0
        assert report.mean_cost_per_iteration == pytest.approx(
            report.total_comparisons / 500)
        assert report.config_echo["eta"] == report.step_size
        assert len(report.iterate_trace) == 500  # stride 1 at this length

    def test_reproducible(self):
        link, config = _abs_config()
        sgd = SGDParams(delta=0.1, epsilon_target=0.5, iterations=300, seed=9,
                        variance_constant=1.3)
        a = run(Abs1D(), link, sgd, config, np.array([1.0]), diagnostic_samples=1000)
        b = run(Abs1D(), link, sgd, config, np.array([1.0]), diagnostic_samples=1000)
        assert a.output_point == b.output_point
        assert a.output_index == b.output_index
        assert a.total_comparisons == b.total_comparisons
        assert a.stationarity_estimate == b.stationarity_estimate
        assert a.iterate_trace == b.iterate_trace

    def test_seed_changes_trajectory(self):
        link, config = _abs_config()
        base = dict(delta=0.1, epsilon_target=0.5, iterations=300,
                    variance_constant=1.3)
        a = run(Abs1D(), link, SGDParams(seed=1, **base), config, np.array([1.0]),
                diagnostic_samples=500)
        b = run(Abs1D(), link, SGDParams(seed=2, **base), config, np.array([1.0]),
                diagnostic_samples=500)
        assert a.output_point != b.output_point

    def test_comparison_cost_tracks_prediction(self):
        link, config = _abs_config()
        iterations = 10_000
        sgd = SGDParams(delta=0.1, epsilon_target=0.5, iterations=iterations, seed=21,
                        variance_constant=1.3)
        report = run(Abs1D(), link, sgd, config, np.array([0.3]),
                     diagnostic_samples=100)
        target = predicted_cost(config.schedule, config.path)
        # exact CLT band from the geometric moments of the truncation index:
        # N = M(M+1)/2 with E[N^2] = (E[M^4] + 2 E[M^3] + E[M^2]) / 4
        b = config.schedule.beta
        m2 = (1 + b) / (1 - b) ** 2
        m3 = (1 + 4 * b + b * b) / (1 - b) ** 3
        m4 = (1 + 11 * b + 11 * b * b + b ** 3) / (1 - b) ** 4
        var_n = (m4 + 2 * m3 + m2) / 4 - target ** 2
        band = max(0.02 * target, 4 * math.sqrt(var_n / iterations))
        assert abs(report.mean_cost_per_iteration - target) <= band

    def test_constant_objective_random_walk(self):
        class Flat:
            name = "flat"
            dimension = 1
            lipschitz_constant = 1.0

            def value(self, x):
                return 0.0

            def values(self, xs):
                return np.zeros(len(xs))

        link, config = _abs_config()
        sgd = SGDParams(delta=0.1, epsilon_target=0.5, iterations=400, seed=5,
                        variance_constant=1.3)
        report = run(Flat(), link, sgd, config, np.array([0.0]),
                     diagnostic_samples=5000)
        # smoothed gradient of a constant is identically zero
        assert report.stationarity_estimate <= 4 * max(report.stationarity_se, 1e-12)

    def test_quadratic_contracts(self):
        # SGD with unbiased bounded-variance gradients pulls the iterate in
        obj = SmoothQuadratic(2, box_radius=6.0)
        delta = 0.5
        gap_bound = 2 * obj.lipschitz_constant * delta
        link = LinkSpec(kind="logistic", tau=gap_bound / 2)
        interval = interval_for_gap_bound(link, gap_bound)
        config = EstimatorConfig(
            link=link, series=logistic_coefficients(200, interval),
            schedule=TruncationSchedule(beta=default_beta(interval)),
            interval=interval)
        x0 = np.array([3.0, 4.0])
        contracted = 0
        for seed in range(20):
            sgd = SGDParams(delta=delta, epsilon_target=1.0, eta=0.01,
                            iterations=1000, seed=seed, variance_constant=1.5,
                            initial_gap_bound=12.5)
            report = run(obj, link, sgd, config, x0, diagnostic_samples=100)
            if np.linalg.norm(report.output_point) < np.linalg.norm(x0):
                contracted += 1
        assert contracted >= 19

    def test_eta_above_cap_rejected(self):
        link, config = _abs_config()
        sgd = SGDParams(delta=0.1, epsilon_target=0.5, eta=1.0, iterations=10,
                        seed=0, variance_constant=1.3)
        with pytest.raises(ValueError):
            run(Abs1D(), link, sgd, config, np.array([0.5]))

    def test_divergence_reported(self):
        class Explodes:
            name = "explodes"
            dimension = 1
            lipschitz_constant = 1.0

            def value(self, x):
                return float("inf") if abs(x[0]) > 0.05 else 0.0

            def values(self, xs):
                out = np.zeros(len(xs))
                out[np.abs(xs[:, 0]) > 0.05] = np.inf
                return out

        link, config = _abs_config()
        sgd = SGDParams(delta=0.1, epsilon_target=0.5, iterations=100, seed=4,
                        variance_constant=1.3)
        with pytest.raises((RunDivergedError, ValueError)):
            run(Explodes(), link, sgd, config, np.array([0.0]),
                diagnostic_samples=100)

    def test_budget_consistency_identity(self):
        # plugging the tuned eta back into the bound reproduces
        # 2*sqrt(2*L_delta*Delta0/T * (d^2/4delta^2) * C * B^2)
        lipschitz, d, delta, delta0, c = 2.0, 3, 0.2, 1.5, 1.2
        iterations = 50_000
        smoothness = lipschitz * math.sqrt(d) / delta
        gap_bound = 2 * lipschitz * delta
        variance = (d * d / (4 * delta * delta)) * c * gap_bound ** 2
        eta = step_size_plan(lipschitz, d, delta, iterations, delta0, c)
        assert eta < 1.0 / smoothness  # tuned branch active
        bound = 2 * delta0 / (eta * iterations) + eta * smoothness * variance
        closed = 2 * math.sqrt(2 * smoothness * delta0 / iterations * variance)
        assert bound == pytest.approx(closed, rel=1e-12)
