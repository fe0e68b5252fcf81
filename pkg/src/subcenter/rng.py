"""Reproducible, independent random streams.

Every stream is a Philox (counter-based) generator seeded from the tuple
``(base_seed, *keys, crc32(purpose))``. Streams for different replications or
purposes never share state, so replications can run in any order or in
parallel and still produce bit-identical draws.
"""

from __future__ import annotations

import zlib

import numpy as np


def purpose_code(purpose: str) -> int:
    return zlib.crc32(purpose.encode("utf-8"))


def stream(base_seed: int, *keys: int, purpose: str = "default") -> np.random.Generator:
    """Generator for ``(base_seed, *keys, purpose)``; keys are non-negative ints."""
    entropy = [int(base_seed) & 0xFFFFFFFFFFFFFFFF, *(int(k) for k in keys), purpose_code(purpose)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
