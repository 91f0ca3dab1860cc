"""Seed mixing and counter-based random streams.

All randomness in the package flows through :func:`stream`, which builds a
Philox generator keyed by ``(seed, purpose, index)``. Philox is a
counter-based bit generator, so the stream for row ``i`` never depends on how
many other rows were drawn or in what order.
"""
from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1

# purpose tags for independent streams
LABELS = 1
MEANS = 2
NOISE = 3
ALGORITHM = 4


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def mix_seed(master: int, *indices: int) -> int:
    """Fold indices into a 64-bit seed: ``h = splitmix64(h ^ idx)`` per index."""
    h = splitmix64(int(master) & MASK64)
    for idx in indices:
        h = splitmix64(h ^ (int(idx) & MASK64))
    return h


def stream(seed: int, purpose: int, index: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence([int(seed) & MASK64, purpose, index])
    return np.random.Generator(np.random.Philox(ss))
