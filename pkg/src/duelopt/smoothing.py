"""Randomized smoothing geometry: sphere directions, the comparison-based
gradient sample, and the value-based reference estimator.

For a direction u on the unit sphere and radius delta, the two-point
identity grad f_delta(x) = (d / 2 delta) * E[(f(x + delta u) -
f(x - delta u)) u] reduces gradient estimation to estimating the
directional gap; substituting the unbiased comparison-based gap estimate
gives an unbiased gradient sample for the smoothed objective.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .estimator import EstimatorConfig, GapEstimate, estimate_gap


@dataclass(frozen=True)
class SmoothingParams:
    delta: float
    dimension: int

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("smoothing radius delta must be positive")
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")


@dataclass(frozen=True)
class GradientSample:
    """One comparison-based gradient sample G = (d / 2 delta) * gap * u."""

    vector: np.ndarray
    gap_estimate: GapEstimate
    direction: np.ndarray


@dataclass(frozen=True)
class ReferenceGradient:
    """Monte Carlo estimate of the smoothed gradient from direct values."""

    vector: np.ndarray
    standard_error: np.ndarray
    n_samples: int


def sample_sphere(d: int, rng) -> np.ndarray:
    """Uniform direction on the unit sphere; d = 1 is a Rademacher sign."""
    if not (isinstance(d, (int, np.integer)) and d >= 1):
        raise ValueError(f"dimension must be a positive integer, got {d!r}")
    if d == 1:
        return np.array([1.0 if rng.random() < 0.5 else -1.0])
    while True:
        v = rng.standard_normal(d)
        norm = np.linalg.norm(v)
        if norm > 0.0:
            return v / norm


def sample_sphere_batch(d: int, n: int, rng) -> np.ndarray:
    """n uniform directions as rows of an (n, d) array."""
    if not (isinstance(d, (int, np.integer)) and d >= 1):
        raise ValueError(f"dimension must be a positive integer, got {d!r}")
    if d == 1:
        return np.where(rng.random((n, 1)) < 0.5, 1.0, -1.0)
    v = rng.standard_normal((n, d))
    norms = np.linalg.norm(v, axis=1, keepdims=True)
    # a zero row has probability zero; resample defensively
    bad = np.nonzero(norms[:, 0] == 0.0)[0]
    for i in bad:
        v[i] = sample_sphere(d, rng)
        norms[i, 0] = 1.0
    return v / norms


def gradient_sample(config: EstimatorConfig, oracle, x, params: SmoothingParams,
                    rng) -> GradientSample:
    """Sample u, estimate the gap of (x - delta u, x + delta u) with fresh
    comparisons, and scale: G = (d / 2 delta) * gap_hat * u.

    Conditionally on x this is unbiased for grad f_delta(x) on the
    logistic path, and biased by at most tau * sup_residual * d / (2 delta)
    on the fitted-series path.
    """
    x = np.asarray(x, dtype=float)
    u = sample_sphere(params.dimension, rng)
    step = params.delta * u
    est = estimate_gap(config, oracle, x - step, x + step, rng)
    scale = params.dimension / (2.0 * params.delta)
    return GradientSample(vector=scale * est.value * u, gap_estimate=est, direction=u)


def reference_smoothed_gradient(objective, x, params: SmoothingParams,
                                n_samples: int, rng) -> ReferenceGradient:
    """Value-based Monte Carlo for grad f_delta(x) via the two-point
    identity; verification-only (uses direct objective values)."""
    if not (isinstance(n_samples, (int, np.integer)) and n_samples >= 1):
        raise ValueError("n_samples must be a positive integer")
    x = np.asarray(x, dtype=float)
    d, delta = params.dimension, params.delta
    dirs = sample_sphere_batch(d, int(n_samples), rng)
    gaps = objective.values(x + delta * dirs) - objective.values(x - delta * dirs)
    samples = (d / (2.0 * delta)) * gaps[:, None] * dirs
    mean = samples.mean(axis=0)
    if n_samples > 1:
        se = samples.std(axis=0, ddof=1) / np.sqrt(n_samples)
    else:
        se = np.full(d, np.inf)
    return ReferenceGradient(vector=mean, standard_error=se, n_samples=int(n_samples))
