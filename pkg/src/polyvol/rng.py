"""Seeded random streams.

Every random draw in the package goes through an :class:`RngStream`.  A
stream is fully determined by ``(seed, key)``; repetitions and parallel
workers get independent substreams via :meth:`RngStream.substream`.
"""

from __future__ import annotations

import secrets

import numpy as np

_SEED_MASK = (1 << 64) - 1


def entropy_seed() -> int:
    """Fresh 64-bit seed from the OS entropy pool."""
    return secrets.randbits(64)


class RngStream:
    """PCG64 generator keyed by a 64-bit seed and a substream path.

    Only three kinds of draw are exposed: uniform reals in [0, 1),
    standard normals and uniform integers in [0, k).  The batched forms
    (``size=...``) consume the generator in the same order as repeated
    scalar draws of the same kind.
    """

    def __init__(self, seed: int | None = None, key: tuple[int, ...] = ()):
        if seed is None:
            seed = entropy_seed()
        seed = int(seed)
        if seed < 0 or seed > _SEED_MASK:
            raise ValueError(f"seed must fit in 64 unsigned bits, got {seed}")
        self.seed = seed
        self.key = tuple(int(k) for k in key)
        ss = np.random.SeedSequence(seed, spawn_key=self.key)
        self.generator = np.random.Generator(np.random.PCG64(ss))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, key={self.key})"

    def substream(self, index: int) -> "RngStream":
        """Independent stream derived from (seed, key + (index,))."""
        return RngStream(self.seed, self.key + (index,))

    def uniform(self, size=None):
        return self.generator.random(size)

    def normal(self, size=None):
        return self.generator.standard_normal(size)

    def integers(self, k: int, size=None):
        return self.generator.integers(0, k, size=size)


def as_stream(rng: RngStream | int | None) -> RngStream:
    if isinstance(rng, RngStream):
        return rng
    return RngStream(rng)
