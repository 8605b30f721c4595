"""Seeded random streams.

Every randomized routine derives its generator from a user seed and a fixed
module tag, so independent components never share a stream.
"""
import zlib

import numpy as np


def stream(seed: int, tag: str) -> np.random.Generator:
    if seed is None or int(seed) < 0:
        raise ValueError("seed must be a nonnegative integer")
    return np.random.default_rng([int(seed), zlib.crc32(tag.encode("ascii"))])


def child_seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2**62))
