"""Deterministic 64-bit PRNG (splitmix64) with per-index substreams.

Reports must be byte-identical across runs and parallel schedules, so each
variation gets its own substream derived from (seed, index) rather than a
position in one shared sequence.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class SplitMix64:
    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_raw(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        return _mix(self._state)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        """Uniform double in [lo, hi) with 53 random bits."""
        u = self.next_raw() >> 11
        return lo + (hi - lo) * (u * 2.0**-53)

    def spawn(self, index: int) -> "SplitMix64":
        """Decorrelated substream for the given index."""
        return SplitMix64(_mix(self._state ^ _mix((index + 1) * _GAMMA)))
