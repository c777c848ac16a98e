"""Counter-based random streams keyed by (seed, stream ids)."""

from __future__ import annotations

import numpy as np

GENERATOR_NAME = "numpy Philox4x64 keyed by SeedSequence([seed, *stream])"


def counter_rng(seed: int, *stream: int) -> np.random.Generator:
    """Independent reproducible generator for one ensemble member or shard."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, stream)])))
