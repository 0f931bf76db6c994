"""xoshiro256** generator seeded through splitmix64.

Fixed by algorithm so that generated scenarios are identical on every
platform and numpy version. Reference update rules:
https://prng.di.unimi.it/xoshiro256starstar.c and
https://prng.di.unimi.it/splitmix64.c
"""
from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


def splitmix64_mix(z: int) -> int:
    """The splitmix64 output finalizer applied to a 64-bit value."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def splitmix64_stream(seed: int, count: int) -> list[int]:
    state = seed & MASK64
    out = []
    for _ in range(count):
        state = (state + GOLDEN_GAMMA) & MASK64
        out.append(splitmix64_mix(state))
    return out


def trial_seed(seed: int, trial: int) -> int:
    """Per-trial seed: ``splitmix64_mix(seed + GOLDEN_GAMMA * (trial + 1))``.

    Each trial's seed depends only on (seed, trial), never on how many draws
    earlier trials consumed.
    """
    return splitmix64_mix((seed + GOLDEN_GAMMA * (trial + 1)) & MASK64)


class Xoshiro256StarStar:
    def __init__(self, seed: int | None = None, state: tuple[int, int, int, int] | None = None):
        if state is None:
            if seed is None:
                raise ValueError("need a seed or an explicit state")
            state = tuple(splitmix64_stream(seed, 4))
        if len(state) != 4 or not any(state):
            raise ValueError("state must be four 64-bit words, not all zero")
        self.s = [w & MASK64 for w in state]

    def next_u64(self) -> int:
        s = self.s
        result = (_rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def random(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def uniform(self, low: float, high: float) -> float:
        return low + (high - low) * self.random()
