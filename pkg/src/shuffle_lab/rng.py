"""Deterministic counter-based random streams (SplitMix64).

Every random draw in this package is a pure function of ``(seed, stream,
counter)``:

    base(seed, stream) = mix64(mix64(seed) + GOLDEN * stream)
    draw_i(base)       = mix64(base + (i + 1) * GOLDEN)        (i = 0, 1, ...)

where ``mix64`` is the SplitMix64 output permutation and GOLDEN is the 64-bit
golden-ratio constant.  Uniform reals use the top 53 bits::

    u01 = (u >> 11) * 2**-53            in [0, 1)

and bounded integers use plain modulo (``u % k``; the bias is < 2**-50 for
every k used here and is part of the contract, not an accident).  Streams are
assigned one per trajectory / per independent sample so results do not depend
on scheduling, chunking or backend.  The compiled kernels implement exactly
the same mapping; ``tests/test_backends.py`` pins the equivalence.
"""

from __future__ import annotations

import numpy as np

GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_MASK = 0xFFFFFFFFFFFFFFFF

ALGORITHM = "splitmix64-counter"

_U = np.uint64
_V_GOLDEN = _U(GOLDEN)
_V_M1 = _U(_M1)
_V_M2 = _U(_M2)


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a 64-bit integer."""
    z &= _MASK
    z ^= z >> 30
    z = (z * _M1) & _MASK
    z ^= z >> 27
    z = (z * _M2) & _MASK
    z ^= z >> 31
    return z


def stream_base(seed: int, stream: int) -> int:
    """Initial state of stream ``stream`` under ``seed``."""
    return mix64((mix64(seed) + GOLDEN * stream) & _MASK)


def derive_seed(seed: int, tag: int) -> int:
    """A sub-seed for an independent experiment component."""
    return mix64((mix64(seed) ^ mix64(tag)) & _MASK)


def mix64_vec(z: np.ndarray) -> np.ndarray:
    """Vectorized mix64 over a uint64 array (values are consumed, not shared)."""
    z = z ^ (z >> _U(30))
    z = z * _V_M1
    z = z ^ (z >> _U(27))
    z = z * _V_M2
    z = z ^ (z >> _U(31))
    return z


class Stream:
    """Sequential view of one counter-based stream.

    Stateful convenience wrapper; the underlying draws stay pure functions of
    the counter, so a stream can be re-created at any position.
    """

    __slots__ = ("base", "counter")

    def __init__(self, seed: int, stream: int = 0, counter: int = 0):
        self.base = stream_base(seed, stream)
        self.counter = counter

    def next_u64(self) -> int:
        u = mix64((self.base + (self.counter + 1) * GOLDEN) & _MASK)
        self.counter += 1
        return u

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * 2.0**-53

    def below(self, k: int) -> int:
        """Integer in [0, k)."""
        return self.next_u64() % k

    def take_u64(self, count: int) -> np.ndarray:
        """The next ``count`` raw draws as a uint64 array."""
        idx = _U(self.counter) + np.arange(1, count + 1, dtype=_U)
        self.counter += count
        return mix64_vec(_U(self.base) + idx * _V_GOLDEN)

    def take_uniform(self, count: int) -> np.ndarray:
        return (self.take_u64(count) >> _U(11)).astype(np.float64) * 2.0**-53
