"""Deterministic 64-bit random bit generator (SplitMix64).

SplitMix64 is used for every randomized run in this package: it is seedable,
has a documented split rule for independent substreams, and its outputs are
bit-exact across platforms because everything is 64-bit integer arithmetic.

Substream k of a generator seeded with s is an independent SplitMix64
seeded with mix64((s + (k + 1) * GAMMA) mod 2^64); substreams derive from
the construction seed, not from the current state, so spawning is
insensitive to how much of the parent stream was consumed.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """The SplitMix64 output scrambler (Stafford mix13 variant)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    __slots__ = ("seed", "_state")

    def __init__(self, seed: int):
        self.seed = seed & MASK64
        self._state = seed & MASK64

    def next64(self) -> int:
        """Next 64 uniform random bits."""
        self._state = (self._state + GAMMA) & MASK64
        return mix64(self._state)

    def spawn(self, index: int) -> "SplitMix64":
        """Independent substream `index`, derived from the construction seed."""
        if index < 0:
            raise ValueError(f"substream index must be >= 0, got {index}")
        return SplitMix64(mix64((self.seed + (index + 1) * GAMMA) & MASK64))

    def __repr__(self) -> str:
        return f"SplitMix64(seed={self.seed:#x})"


def sample_exponent(rng: SplitMix64) -> int:
    """Draw j >= 1 with P(j = n) = 2^-n, from raw bits only.

    Counts fair-coin flips up to and including the first head: the count of
    trailing zero bits of a uniform word is geometric, and an all-zero word
    (probability 2^-64) just means 64 tails so far.  No floating point.
    """
    base = 1
    while True:
        word = rng.next64()
        if word:
            return base + ((word & -word).bit_length() - 1)
        base += 64
