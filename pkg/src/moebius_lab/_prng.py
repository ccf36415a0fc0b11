"""SplitMix64 pseudo-random generator.

Implemented from the published reference algorithm (Steele, Lea, Flood 2014):
state advances by the 64-bit golden-gamma 0x9E3779B97F4A7C15 and each output is
the finalized mix z ^= z>>30 * 0xBF58476D1CE4E5B9; z ^= z>>27 * 0x94D049BB133111EB;
z ^= z>>31.  Chosen because it is trivially reproducible across languages, so
seeded fixtures stay comparable between implementations and runs.
"""

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


class SplitMix64:
    """Deterministic 64-bit generator with a tiny state."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * _M1) & _MASK
        z = ((z ^ (z >> 27)) * _M2) & _MASK
        return z ^ (z >> 31)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        """Uniform in [lo, hi) using the top 53 bits."""
        return lo + (hi - lo) * (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def complex_uniform(self, scale: float = 1.0) -> complex:
        re = self.uniform(-1.0, 1.0)
        im = self.uniform(-1.0, 1.0)
        return scale * complex(re, im)
