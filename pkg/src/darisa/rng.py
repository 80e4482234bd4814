"""Counter-based random number generation.

Every stochastic quantity in the package is a pure function of a 64-bit
seed.  Philox is used throughout; independent purposes (channel gains,
phase draws, randomization candidates, noise) get disjoint key spaces via
a stream offset in the upper key word.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1

# stream identifiers (upper Philox key word)
CHANNEL = 0
PHASES = 1
DRAWS = 2
NOISE = 3


def generator(seed: int, stream: int = CHANNEL) -> np.random.Generator:
    """Philox generator keyed by (stream, seed)."""
    key = ((stream & MASK64) << 64) | (seed & MASK64)
    return np.random.Generator(np.random.Philox(key=key))


def trial_seed(seed: int, trial: int) -> int:
    """Per-trial seed: base seed XOR trial index."""
    return (seed ^ trial) & MASK64
