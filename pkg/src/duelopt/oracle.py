"""Simulated pairwise-comparison oracle with exact query accounting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .links import LinkSpec, sigma
from .seeding import make_rng


@dataclass(frozen=True)
class BlockOutcome:
    """Result of a block of repeated comparisons of one pair.

    ``all_ones`` / ``all_zeros`` are the indicator bits whose means are
    p^m and (1-p)^m; for m >= 1 they are never both set.
    """

    size_m: int
    all_ones: int
    all_zeros: int


class ComparisonOracle:
    """Answers "is f(y) preferred to f(x)?" with win probability
    sigma((f(y) - f(x)) / tau).

    Holds one seedable stream: identical seeds and call sequences give
    bit-identical outcomes.  A single instance is not thread-safe; use one
    oracle per worker, each with its own derived sub-seed.
    """

    def __init__(self, objective, link: LinkSpec, rng=None, seed: int | None = None):
        if rng is None:
            rng = make_rng(0 if seed is None else seed)
        self.objective = objective
        self.link = link
        self._rng = rng
        self._query_count = 0

    @property
    def query_count(self) -> int:
        return self._query_count

    def reset_stats(self) -> None:
        self._query_count = 0

    def stats(self) -> int:
        """Snapshot of the comparison counter."""
        return self._query_count

    def _win_probability(self, x, y) -> float:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        d = self.objective.dimension
        if x.shape != (d,) or y.shape != (d,):
            raise ValueError(f"points must have shape ({d},), got {x.shape} and {y.shape}")
        gap = self.objective.value(y) - self.objective.value(x)
        return sigma(self.link, gap)

    def compare(self, x, y) -> int:
        """One comparison; consumes exactly one uniform draw."""
        p = self._win_probability(x, y)
        self._query_count += 1
        return int(self._rng.random() < p)

    def compare_block(self, x, y, m: int) -> BlockOutcome:
        """m fresh comparisons of the same pair; counts all m queries."""
        if not (isinstance(m, (int, np.integer)) and m >= 1):
            raise ValueError(f"block size must be a positive integer, got {m!r}")
        p = self._win_probability(x, y)
        draws = self._rng.random(m)
        self._query_count += int(m)
        wins = draws < p
        return BlockOutcome(
            size_m=int(m),
            all_ones=int(wins.all()),
            all_zeros=int((~wins).all()),
        )
