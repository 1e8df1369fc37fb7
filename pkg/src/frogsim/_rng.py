"""Counter-based SplitMix64 streams shared by every simulation kernel.

A stream is a 64-bit key.  Its ``s``-th output (``s = 0, 1, ...``) is::

    mix64(key + (s + 1) * GAMMA)          (arithmetic mod 2**64)

with the SplitMix64 constants below.  Derived keys use the same rule, so
trial ``i`` of a run seeded with ``master`` has key ``derive(master, i)`` and
frog ``v`` of that trial has key ``derive(derive(master, i), v)``.  Because
every draw is addressed by (key, counter), results do not depend on the order
in which trials or frogs are processed.
"""

import numpy as np
from numba import njit

GAMMA = np.uint64(0x9E3779B97F4A7C15)
MIX1 = np.uint64(0xBF58476D1CE4E5B9)
MIX2 = np.uint64(0x94D049BB133111EB)

_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0

MASK64 = (1 << 64) - 1


@njit(cache=True)
def mix64(z):
    z = (z ^ (z >> _S30)) * MIX1
    z = (z ^ (z >> _S27)) * MIX2
    return z ^ (z >> _S31)


@njit(cache=True)
def derive(key, index):
    return mix64(key + np.uint64(index + 1) * GAMMA)


@njit(cache=True)
def uniform(key, index):
    """Float in [0, 1) with 53 random bits."""
    return np.float64(derive(key, index) >> _S11) * _INV53


@njit(cache=True)
def below(key, index, m):
    """Integer in [0, m)."""
    return np.int64(uniform(key, index) * m)


def as_key(seed: int) -> np.uint64:
    """Reduce an arbitrary Python int to a 64-bit stream key."""
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    return np.uint64(seed & MASK64)
