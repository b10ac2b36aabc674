"""SplitMix64, the fixed pseudo-random generator behind every generator family.

The stream is fully specified so instances can be reproduced bit-for-bit by
any implementation:

    state <- state + 0x9E3779B97F4A7C15           (mod 2**64)
    z <- state
    z <- (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9   (mod 2**64)
    z <- (z XOR (z >> 27)) * 0x94D049BB133111EB   (mod 2**64)
    output z XOR (z >> 31)

``below(n)`` draws uniformly from ``[0, n)`` by rejection: outputs smaller
than ``2**64 mod n`` are discarded and the result is ``x mod n``.
``split()`` returns a child generator seeded with the parent's next output.
"""

from __future__ import annotations

from typing import MutableSequence, Sequence, TypeVar

T = TypeVar("T")

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        if n <= 0:
            raise ValueError("n must be positive")
        threshold = (1 << 64) % n
        while True:
            x = self.next_u64()
            if x >= threshold:
                return x % n

    def between(self, lo: int, hi: int) -> int:
        """Uniform integer in the closed range [lo, hi]."""
        return lo + self.below(hi - lo + 1)

    def coin(self) -> bool:
        return self.next_u64() >> 63 == 1

    def choice(self, items: Sequence[T]) -> T:
        return items[self.below(len(items))]

    def shuffle(self, items: MutableSequence[T]) -> None:
        # Fisher-Yates from the back
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample(self, population: Sequence[T], count: int) -> list[T]:
        """``count`` distinct items in draw order (partial Fisher-Yates from the front)."""
        size = len(population)
        if count > size:
            raise ValueError("sample larger than population")
        # index array kept implicitly: only displaced slots are stored
        moved: dict[int, int] = {}
        picked = []
        for i in range(count):
            j = i + self.below(size - i)
            picked.append(moved.get(j, j))
            moved[j] = moved.get(i, i)
        return [population[p] for p in picked]

    def split(self) -> "SplitMix64":
        return SplitMix64(self.next_u64())
