"""Seeded random streams.

All randomness goes through numpy's counter-based Philox bit generator.
Replicas get independent child streams via ``SeedSequence.spawn`` so that
results do not depend on how work is scheduled.
"""

from __future__ import annotations

from typing import Union

import numpy as np

GENERATOR_NAME = "numpy.random.Philox"
GENERATOR_VERSION = np.__version__

SeedLike = Union[None, int, np.random.SeedSequence, np.random.Generator]


def make_rng(seed: SeedLike = None) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.Philox(seed))
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def spawn(seed: SeedLike, count: int) -> list[np.random.SeedSequence]:
    """Independent child seeds, one per replica."""
    if isinstance(seed, np.random.Generator):
        seed = int(seed.integers(2**63))
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return ss.spawn(count)
