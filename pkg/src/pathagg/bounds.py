"""Switching and iteration bounds, computed exactly with integers where asserted."""

from __future__ import annotations

import math


def floor_log43(k: int) -> int:
    """Largest t with (4/3)**t <= k, i.e. 4**t <= k * 3**t."""
    if k < 1:
        raise ValueError("k must be positive")
    t = 0
    while 4 ** (t + 1) <= k * 3 ** (t + 1):
        t += 1
    return t


def iteration_bound(k: int) -> int:
    return 0 if k == 0 else floor_log43(k) + 1


def safe_switching_bound(k: int) -> int:
    """2 * (floor(log_{4/3} k) + 1); the bound actually asserted."""
    return 2 * iteration_bound(k)


def paper_switching_bound(k: int) -> float:
    """Real-valued 2 * log_{4/3} k, reported but never asserted."""
    return 0.0 if k <= 1 else 2 * math.log(k) / math.log(4 / 3)


def ceil_log2(n: int) -> int:
    return (n - 1).bit_length() if n > 1 else 0
