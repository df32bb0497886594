"""Deterministic derivation of random streams from a master seed.

Every logical sampling context (oracle, iteration, replicate chunk, ...)
gets its own child stream keyed by a path of small integers.  Results are
therefore independent of execution order and of how work is split across
workers: a context's stream depends only on ``(master_seed, *path)``.
"""

from __future__ import annotations

import numpy as np

_SEED_MASK = (1 << 63) - 1


def seed_sequence(master_seed: int, *path: int) -> np.random.SeedSequence:
    """SeedSequence for the child stream addressed by ``path``."""
    entropy = int(master_seed) & _SEED_MASK
    return np.random.SeedSequence(entropy=entropy, spawn_key=tuple(int(p) for p in path))


def make_rng(master_seed: int, *path: int) -> np.random.Generator:
    """Fresh generator for the child stream addressed by ``path``."""
    return np.random.default_rng(seed_sequence(master_seed, *path))
