"""Deterministic random streams.

Every sampling entry point takes an integer seed and builds its stream
through :func:`make_rng`, so equal seeds give bit-identical samples.  The
counter-based Philox generator keeps substreams independent.
"""

import numpy as np


def make_rng(seed):
    """Counter-based generator for the given integer seed."""
    return np.random.Generator(np.random.Philox(key=np.uint64(seed)))


def spawn(seed, index):
    """Independent substream `index` of the stream with the given seed.

    The index becomes the second word of the 128-bit Philox key, so
    substreams never overlap the base stream (index 0 is the base).
    """
    key = np.array([seed, index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
