"""Nonsmooth Lipschitz test objectives with known constants.

Each objective exposes ``dimension``, ``lipschitz_constant``, a scalar
``value`` and a batched ``values``; where a closed-form ball-smoothed
gradient exists it is provided for verification.
"""

from __future__ import annotations

import numpy as np

from .seeding import make_rng


def _check_point(x, dimension: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (dimension,):
        raise ValueError(f"expected point of shape ({dimension},), got {x.shape}")
    return x


def _check_batch(xs, dimension: int) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 2 or xs.shape[1] != dimension:
        raise ValueError(f"expected batch of shape (n, {dimension}), got {xs.shape}")
    return xs


class Abs1D:
    """f(x) = |x| in one dimension; Lipschitz constant 1."""

    name = "abs1d"

    def __init__(self):
        self.dimension = 1
        self.lipschitz_constant = 1.0

    def value(self, x) -> float:
        x = _check_point(x, 1)
        return float(abs(x[0]))

    def values(self, xs) -> np.ndarray:
        xs = _check_batch(xs, 1)
        return np.abs(xs[:, 0])

    def smoothed_gradient(self, x, delta: float) -> np.ndarray:
        """Exact gradient of the ball smoothing of |x|: x/delta inside the
        smoothing interval, sign(x) outside."""
        x = _check_point(x, 1)
        return np.array([abs1d_smoothed_gradient(float(x[0]), delta)])


def abs1d_smoothed_gradient(x: float, delta: float) -> float:
    """d/dx of E|x + delta*V| with V ~ Unif[-1, 1].

    The smoothed value is (x^2 + delta^2) / (2 delta) on |x| <= delta and
    |x| outside, so the gradient is x/delta clipped to +-1.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    if abs(x) <= delta:
        return x / delta
    return float(np.sign(x))


class L1Norm:
    """f(x) = sum_i |x_i|; Lipschitz constant sqrt(d) in the Euclidean norm."""

    name = "l1norm"

    def __init__(self, dimension: int):
        if dimension < 1:
            raise ValueError("dimension must be >= 1")
        self.dimension = int(dimension)
        self.lipschitz_constant = float(np.sqrt(dimension))

    def value(self, x) -> float:
        x = _check_point(x, self.dimension)
        return float(np.abs(x).sum())

    def values(self, xs) -> np.ndarray:
        xs = _check_batch(xs, self.dimension)
        return np.abs(xs).sum(axis=1)


class MaxAffine:
    """f(x) = max_i (a_i . x + b_i); Lipschitz constant max_i ||a_i||_2."""

    name = "maxaffine"

    def __init__(self, slopes, offsets):
        slopes = np.asarray(slopes, dtype=float)
        offsets = np.asarray(offsets, dtype=float)
        if slopes.ndim != 2 or offsets.shape != (slopes.shape[0],):
            raise ValueError("slopes must be (k, d) and offsets (k,)")
        self.slopes = slopes
        self.offsets = offsets
        self.dimension = int(slopes.shape[1])
        self.lipschitz_constant = float(np.max(np.linalg.norm(slopes, axis=1)))

    @classmethod
    def random(cls, dimension: int, pieces: int, seed: int) -> "MaxAffine":
        """Reproducible random instance: unit-ish slopes, small offsets.

        The seed recipe is part of the published configuration so runs can
        be replayed exactly.
        """
        rng = make_rng(seed, 97)
        slopes = rng.standard_normal((pieces, dimension))
        slopes /= np.maximum(np.linalg.norm(slopes, axis=1, keepdims=True), 1e-12)
        offsets = rng.uniform(-1.0, 1.0, pieces)
        return cls(slopes, offsets)

    def value(self, x) -> float:
        x = _check_point(x, self.dimension)
        return float(np.max(self.slopes @ x + self.offsets))

    def values(self, xs) -> np.ndarray:
        xs = _check_batch(xs, self.dimension)
        return np.max(xs @ self.slopes.T + self.offsets, axis=1)


class SmoothQuadratic:
    """f(x) = ||x||^2 / 2, used as a smooth control.

    Ball smoothing shifts a quadratic by a constant, so the smoothed
    gradient equals the plain gradient x exactly; this isolates estimator
    error from smoothing error.  The Lipschitz constant is declared over
    the box [-box_radius, box_radius]^d, where sup ||grad f|| =
    box_radius * sqrt(d).
    """

    name = "quadratic"

    def __init__(self, dimension: int, box_radius: float = 6.0):
        if dimension < 1:
            raise ValueError("dimension must be >= 1")
        if not box_radius > 0:
            raise ValueError("box radius must be positive")
        self.dimension = int(dimension)
        self.box_radius = float(box_radius)
        self.lipschitz_constant = float(box_radius * np.sqrt(dimension))

    def value(self, x) -> float:
        x = _check_point(x, self.dimension)
        return float(0.5 * (x @ x))

    def values(self, xs) -> np.ndarray:
        xs = _check_batch(xs, self.dimension)
        return 0.5 * np.einsum("ij,ij->i", xs, xs)

    def smoothed_gradient(self, x, delta: float) -> np.ndarray:
        x = _check_point(x, self.dimension)
        return x.copy()


_BY_NAME = {
    "abs1d": Abs1D,
    "l1norm": L1Norm,
    "maxaffine": MaxAffine,
    "quadratic": SmoothQuadratic,
}


def make_objective(name: str, dimension: int = 1, *, pieces: int = 5,
                   seed: int = 2024, box_radius: float = 6.0):
    """Objective factory used by the CLI config."""
    if name == "abs1d":
        return Abs1D()
    if name == "l1norm":
        return L1Norm(dimension)
    if name == "maxaffine":
        return MaxAffine.random(dimension, pieces, seed)
    if name == "quadratic":
        return SmoothQuadratic(dimension, box_radius=box_radius)
    raise ValueError(f"unknown objective {name!r}; expected one of {sorted(_BY_NAME)}")
