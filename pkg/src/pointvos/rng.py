"""Seedable, portable random number generation for all sampling code.

Every sampler in this package draws from :class:`Xoshiro256` so that a
(seed, input) pair maps to the same output on any platform and any Python
version.  The generator is xoshiro256** with its state initialised from the
64-bit seed via splitmix64, the standard seeding recipe for that family.
Outputs that depend on randomness carry :data:`RNG_ALGORITHM` in their
metadata so results stay reproducible across package versions.
"""

from __future__ import annotations

RNG_ALGORITHM = "xoshiro256**/splitmix64"

_MASK64 = (1 << 64) - 1


def _splitmix64_stream(seed: int, count: int) -> list[int]:
    out = []
    s = seed & _MASK64
    for _ in range(count):
        s = (s + 0x9E3779B97F4A7C15) & _MASK64
        z = s
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        out.append(z ^ (z >> 31))
    return out


class Xoshiro256:
    """xoshiro256** seeded through splitmix64.

    Produces a platform-independent stream of 64-bit integers; helpers
    derive bounded integers (unbiased, by rejection) and index samples
    without replacement from it.
    """

    __slots__ = ("_s0", "_s1", "_s2", "_s3")

    def __init__(self, seed: int):
        self._s0, self._s1, self._s2, self._s3 = _splitmix64_stream(seed, 4)

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s0, self._s1, self._s2, self._s3
        r = (s1 * 5) & _MASK64
        r = (((r << 7) | (r >> 57)) & _MASK64) * 9 & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & _MASK64
        self._s0, self._s1, self._s2, self._s3 = s0, s1, s2, s3
        return r

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound), unbiased via rejection."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        threshold = (1 << 64) - ((1 << 64) % bound)
        while True:
            r = self.next_u64()
            if r < threshold:
                return r % bound

    def integers_below(self, bound: int, count: int) -> list[int]:
        """`count` uniform integers in [0, bound), as a list.

        Inlines the generator step: sampling loops draw these in batches of
        thousands, where per-call overhead dominates.
        """
        if bound <= 0:
            raise ValueError("bound must be positive")
        s0, s1, s2, s3 = self._s0, self._s1, self._s2, self._s3
        threshold = (1 << 64) - ((1 << 64) % bound)
        out = []
        append = out.append
        while len(out) < count:
            r = (s1 * 5) & _MASK64
            r = (((r << 7) | (r >> 57)) & _MASK64) * 9 & _MASK64
            t = (s1 << 17) & _MASK64
            s2 ^= s0
            s3 ^= s1
            s1 ^= s2
            s0 ^= s3
            s2 ^= t
            s3 = ((s3 << 45) | (s3 >> 19)) & _MASK64
            if r < threshold:
                append(r % bound)
        self._s0, self._s1, self._s2, self._s3 = s0, s1, s2, s3
        return out

    def sample_without_replacement(self, population: int, k: int) -> list[int]:
        """k distinct indices from range(population), in draw order."""
        if k > population:
            raise ValueError("cannot sample more than the population")
        # Partial Fisher-Yates over a sparse index map keeps this O(k).
        swapped: dict[int, int] = {}
        out = []
        for i in range(k):
            j = i + self.below(population - i)
            out.append(swapped.get(j, j))
            swapped[j] = swapped.get(i, i)
        return out
