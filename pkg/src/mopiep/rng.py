"""Small portable PRNG: splitmix64 seeding + xorshift64*.

Everything is done with Python integers masked to 64 bits so that the stream
is identical on every platform.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1


def splitmix64(x: int) -> tuple[int, int]:
    """Return (new_state, output)."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return x, z ^ (z >> 31)


class XorShift64Star:
    """xorshift64* generator (Vigna 2016), state never zero."""

    def __init__(self, seed: int):
        _, s = splitmix64(int(seed) & _MASK)
        self.state = s or 0x9E3779B97F4A7C15

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & _MASK
        x ^= x >> 27
        self.state = x
        return (x * 0x2545F4914F6CDD1D) & _MASK

    def uniform(self) -> float:
        """Uniform on [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0 ** -53

    def uniform_array(self, n: int, low: float = 0.0, high: float = 1.0) -> np.ndarray:
        return np.array([low + (high - low) * self.uniform() for _ in range(n)])


def derive_seed(master: int, counter: int) -> int:
    """Per-run seed from a master seed and a run index."""
    s = int(master) & _MASK
    for _ in range(int(counter) + 1):
        s, out = splitmix64(s)
    return out
