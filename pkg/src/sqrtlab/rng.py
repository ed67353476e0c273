"""Reproducible random streams.

Every stream is a Philox4x64-10 counter-based generator keyed through
numpy's SeedSequence hash of ``(seed, *stream)``.  Grid cell i of a sweep
draws from ``generator(seed, i)``, so results do not depend on scheduling.
"""

from __future__ import annotations

import numpy as np

ALGORITHM = "philox4x64-10/seedsequence"


def generator(seed: int, *stream: int) -> np.random.Generator:
    if seed < 0 or seed >= 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *stream])))


def complex_normal(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)
