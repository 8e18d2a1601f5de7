"""Counter-based random streams.

Every random draw in the package comes from a Philox generator keyed by
``(seed, *stream)``.  Distinct stream tuples give statistically independent
sequences, so work can be split across threads without changing results.
"""

import numpy as np


def make_rng(seed, *stream):
    seed = int(seed)
    if seed < 0 or seed >= 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(i) for i in stream))
    return np.random.Generator(np.random.Philox(ss))
