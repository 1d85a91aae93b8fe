"""Seed derivation.

Every random draw in the package goes through :func:`make_rng`.  Trial ``t``
of an experiment with master seed ``m`` uses ``derive_seed(m, t)``, which is
the first 64 bits of ``numpy.random.SeedSequence(m, spawn_key=(t,))``.  The
mapping is fixed by numpy's SeedSequence hashing, so per-trial streams are
independent of how trials are scheduled.
"""

import numpy as np

_MASK64 = (1 << 64) - 1


def derive_seed(master, index):
    """64-bit seed for child stream ``index`` of ``master``."""
    ss = np.random.SeedSequence(int(master) & _MASK64, spawn_key=(int(index),))
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return (int(hi) << 32) | int(lo)


def make_rng(seed):
    """PCG64 generator for a 64-bit unsigned seed."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed) & _MASK64)))
