"""Seeded random streams.

A master seed feeds :class:`numpy.random.SeedSequence`; replication ``i``
uses the child sequence with spawn key ``(i,)``. Streams are therefore a
pure function of ``(seed, i)`` and independent of execution order.
"""

from __future__ import annotations

import numpy as np


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def replication_rng(seed: int, index: int) -> np.random.Generator:
    """Generator for replication ``index`` under master ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
