"""Seed splitting.

Every random draw in the package comes from ``sub_rng(seed, *path)``: the
generator is keyed by the root seed plus a path of labels and counters, so
the stream for sample ``i`` never depends on how many samples came before
it or on execution order.
"""

from __future__ import annotations

import zlib

import numpy as np

DEFAULT_SEED = 42


def _word(part) -> int:
    if isinstance(part, (int, np.integer)):
        if part < 0:
            raise ValueError("seed path integers must be non-negative")
        return int(part)
    return zlib.crc32(str(part).encode())


def sub_rng(seed: int, *path) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([_word(seed), *map(_word, path)]))
