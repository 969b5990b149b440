"""Small shared helpers."""

import zlib

import numpy as np


def substream(seed, name):
    """Named, independent random substream derived from a single run seed."""
    return np.random.default_rng([int(seed), zlib.crc32(name.encode("utf-8"))])
