"""Seeded random streams.

Every randomized check draws from substreams keyed by ``(seed, stream, block)``
where a block holds ``BLOCK`` consecutive samples.  Results therefore depend
only on the seed, the stream name and the sample index, never on evaluation
order or on how a sweep is split across workers.
"""

from __future__ import annotations

import zlib

import numpy as np

BLOCK = 256


def stream_id(name: str) -> int:
    return zlib.crc32(name.encode("utf-8"))


def rng(seed: int, stream: str, block: int = 0) -> np.random.Generator:
    return np.random.default_rng([int(seed) & (2**64 - 1), stream_id(stream), int(block)])


def _draw(seed, stream, count, draw_block):
    parts = []
    for b in range((count + BLOCK - 1) // BLOCK):
        parts.append(draw_block(rng(seed, stream, b)))
    out = np.concatenate(parts, axis=0) if parts else None
    return out[:count] if out is not None else out


def gaussian(seed: int, stream: str, count: int, dim: int) -> np.ndarray:
    """``count`` standard Gaussian points in R^dim, shape ``(count, dim)``."""
    if count == 0:
        return np.zeros((0, dim))
    return _draw(seed, stream, count, lambda g: g.standard_normal((BLOCK, dim)))


def uniform(seed: int, stream: str, count: int, low: float = 0.0, high: float = 1.0) -> np.ndarray:
    if count == 0:
        return np.zeros(0)
    return _draw(seed, stream, count, lambda g: g.uniform(low, high, BLOCK))


def half_open_up(seed: int, stream: str, count: int, high: float = 2.0) -> np.ndarray:
    """Uniform samples on the interval (0, high]."""
    return high * (1.0 - uniform(seed, stream, count))
