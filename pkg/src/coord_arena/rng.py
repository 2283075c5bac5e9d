"""Deterministic random number generation (PCG32).

All shuffles and random agents in this package draw from PCG32 with fixed
constants so that a given seed reproduces the same episode bit-for-bit on
every platform (and in reimplementations in other languages).
"""

from __future__ import annotations

MASK64 = 0xFFFFFFFFFFFFFFFF
MASK32 = 0xFFFFFFFF

PCG32_MULTIPLIER = 6364136223846793005
# Stream constant chosen so the increment equals the canonical PCG32 default
# (0xda3e39cb94b95bdb).
DEFAULT_STREAM = 0xDA3E39CB94B95BDB >> 1


class Pcg32:
    """PCG32 (XSH RR 64/32) with the reference seeding procedure."""

    __slots__ = ("state", "inc")

    def __init__(self, seed: int, stream: int = DEFAULT_STREAM):
        if not 0 <= seed <= MASK64:
            raise ValueError("seed must fit in 64 bits")
        self.inc = ((stream << 1) | 1) & MASK64
        self.state = 0
        self.next_uint32()
        self.state = (self.state + seed) & MASK64
        self.next_uint32()

    def next_uint32(self) -> int:
        old = self.state
        self.state = (old * PCG32_MULTIPLIER + self.inc) & MASK64
        xorshifted = (((old >> 18) ^ old) >> 27) & MASK32
        rot = old >> 59
        return ((xorshifted >> rot) | (xorshifted << ((-rot) & 31))) & MASK32

    def randrange(self, bound: int) -> int:
        """Uniform integer in [0, bound), bias-free (reference bounded method)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        threshold = (1 << 32) % bound
        while True:
            r = self.next_uint32()
            if r >= threshold:
                return r % bound

    def choice(self, seq):
        return seq[self.randrange(len(seq))]

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates, iterating from the last index down."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randrange(i + 1)
            items[i], items[j] = items[j], items[i]


def make_rng(seed: int) -> Pcg32:
    """Generator for the fixed default stream; same seed, same sequence."""
    return Pcg32(seed)
