"""Reproducible, splittable random streams.

A stream is the pair ``(base_seed, stream_id)``. The pair is hashed through
``numpy.random.SeedSequence`` into the key of a Philox counter-based generator,
so a stream can be rebuilt anywhere, in any order, without sharing state.
Child streams are identified by mixing integer labels into ``stream_id``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def mix_ids(*parts: int) -> int:
    """Order-sensitive 64-bit hash of a tuple of integers."""
    h = 0x6A09E667F3BCC908
    for p in parts:
        h = _splitmix64(h ^ (int(p) & _MASK64))
    return h


@dataclass(frozen=True)
class RngStream:
    base_seed: int
    stream_id: int = 0

    def __post_init__(self):
        object.__setattr__(self, "base_seed", int(self.base_seed) & _MASK64)
        object.__setattr__(self, "stream_id", int(self.stream_id) & _MASK64)

    def child(self, *labels: int) -> "RngStream":
        return RngStream(self.base_seed, mix_ids(self.stream_id, *labels))

    def generator(self) -> np.random.Generator:
        """A fresh generator positioned at the start of this stream."""
        ss = np.random.SeedSequence([self.base_seed, self.stream_id])
        return np.random.Generator(np.random.Philox(ss))


# labels used when deriving child streams
SHOCKS = 1
RESIDUAL = 2
WILD = 3
