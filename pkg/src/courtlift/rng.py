"""Deterministic random streams built on the Philox counter-based generator.

Every consumer of randomness derives an independent stream keyed by
(seed, index) with a purpose tag in the counter block, so results are
reproducible bit-for-bit across platforms and independent of evaluation
order or thread count.
"""

from __future__ import annotations

import numpy as np

PURPOSE_CAMERA = 1
PURPOSE_BALL = 2
PURPOSE_HEIGHT_NOISE = 3
PURPOSE_DIAMETER_NOISE = 4
PURPOSE_REBALANCE = 5


def stream(seed: int, index: int = 0, purpose: int = 0) -> np.random.Generator:
    """Independent Philox stream for (seed, index, purpose).

    seed and index must be representable as unsigned 64-bit integers.
    """
    if seed < 0 or seed > np.iinfo(np.uint64).max:
        raise ValueError(f"seed must fit in uint64, got {seed}")
    if index < 0 or index > np.iinfo(np.uint64).max:
        raise ValueError(f"index must fit in uint64, got {index}")
    key = np.array([seed, index], dtype=np.uint64)
    counter = np.array([0, 0, 0, purpose], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))
