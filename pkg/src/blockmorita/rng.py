"""Deterministic 64-bit linear-congruential randomness.

All randomized procedures in the package draw from this generator so that
a fixed seed reproduces every intermediate object bit for bit.  Streams
for independent operations are derived from (seed, tag) so concurrent
calls stay deterministic.
"""

from __future__ import annotations

import os

MASK = (1 << 64) - 1
_MUL = 6364136223846793005
_INC = 1442695040888963407

DEFAULT_SEED = 0xB10C


def seed_from_env() -> int:
    v = os.environ.get("BLOCKMORITA_SEED")
    if v is None:
        return DEFAULT_SEED
    return int(v, 0)


def _fnv64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) & MASK
    return h


class Rng:
    """64-bit LCG; `derive` forks an independent, reproducible stream."""

    def __init__(self, seed: int = DEFAULT_SEED):
        self.state = (seed ^ 0x9E3779B97F4A7C15) & MASK
        self.next64()

    def next64(self) -> int:
        self.state = (self.state * _MUL + _INC) & MASK
        # scramble the high bits down; plain LCG low bits are weak
        x = self.state
        x ^= x >> 33
        x = (x * 0xFF51AFD7ED558CCD) & MASK
        x ^= x >> 33
        return x

    def randint(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        return self.next64() % n

    def nonzero(self, n: int) -> int:
        """Uniform integer in [1, n)."""
        return 1 + self.next64() % (n - 1)

    def choice(self, seq):
        return seq[self.randint(len(seq))]

    def shuffled(self, seq):
        items = list(seq)
        for i in range(len(items) - 1, 0, -1):
            j = self.randint(i + 1)
            items[i], items[j] = items[j], items[i]
        return items

    def derive(self, tag: str) -> "Rng":
        r = Rng.__new__(Rng)
        r.state = (self.state ^ _fnv64(tag.encode())) & MASK
        r.next64()
        return r
