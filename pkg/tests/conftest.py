import numpy as np
import pytest

from duelopt import (
    EstimatorConfig,
    LinkSpec,
    TruncationSchedule,
    default_beta,
    fit_odd_coefficients,
    interval_for_gap_bound,
    logistic_coefficients,
)


@pytest.fixture(scope="session")
def logistic_setup():
    """Reference regime: logistic link, tau=0.5, gap bound B=1 (B/tau=2)."""
    link = LinkSpec(kind="logistic", tau=0.5)
    interval = interval_for_gap_bound(link, 1.0)
    series = logistic_coefficients(200, interval)
    schedule = TruncationSchedule(beta=default_beta(interval))
    config = EstimatorConfig(link=link, series=series, schedule=schedule, interval=interval)
    return link, interval, series, schedule, config


def _general_setup(kind):
    link = LinkSpec(kind=kind, tau=0.5)
    interval = interval_for_gap_bound(link, 1.0)
    series = fit_odd_coefficients(link, interval, 1e-8, 160)
    schedule = TruncationSchedule(beta=default_beta(interval, series))
    config = EstimatorConfig(link=link, series=series, schedule=schedule, interval=interval)
    return link, interval, series, schedule, config


@pytest.fixture(scope="session")
def cauchit_setup():
    return _general_setup("cauchit")


@pytest.fixture(scope="session")
def probit_setup():
    return _general_setup("probit")


@pytest.fixture
def rng():
    return np.random.default_rng(42)
