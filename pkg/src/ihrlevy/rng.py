"""Counter-based random streams.

A stream is identified by a base seed plus any number of integer (or short
string) keys, e.g. ``make_rng(seed, replication, "panel")``.  The same key
tuple always yields the same Philox stream, independently of the order in
which streams are created, so replications can run in any order or in
parallel.
"""

import zlib

import numpy as np


def _key_int(key):
    if isinstance(key, str):
        return zlib.crc32(key.encode())
    key = int(key)
    if key < 0:
        raise ValueError("stream keys must be non-negative")
    return key


def make_rng(seed, *keys):
    """Return a ``numpy.random.Generator`` backed by Philox."""
    entropy = [_key_int(seed)] + [_key_int(k) for k in keys]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def as_rng(rng):
    """Accept a Generator, an int seed or None."""
    if isinstance(rng, np.random.Generator):
        return rng
    if rng is None:
        return np.random.default_rng()
    return make_rng(rng)
