"""Seeded random streams.

Every algorithm takes a :class:`numpy.random.Generator` (PCG64).  Independent
trials derive their own stream from a master seed through
:class:`numpy.random.SeedSequence` with ``spawn_key=(trial,)``, so trial ``i``
gets the same numbers no matter which worker runs it or in what order.
"""

from __future__ import annotations

import numpy as np


def make_rng(seed=None) -> np.random.Generator:
    """A PCG64 generator; an existing Generator is passed through untouched."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def trial_rng(master_seed: int, trial: int) -> np.random.Generator:
    """Stream for trial ``trial`` of an experiment seeded with ``master_seed``."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(trial),))
    return np.random.Generator(np.random.PCG64(ss))


def derived_rng(master_seed: int, *key: int) -> np.random.Generator:
    """Stream for an arbitrary integer key path under ``master_seed``."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(x) for x in key))
    return np.random.Generator(np.random.PCG64(ss))
