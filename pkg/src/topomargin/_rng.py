"""Deterministic 64-bit RNG used for walks, seeding, and synthetic data.

splitmix64 is small enough to reimplement identically in the compiled core,
which is what makes the pure-Python and Cython training kernels produce
bit-identical streams.
"""

_MASK = (1 << 64) - 1
_GOLD = 0x9E3779B97F4A7C15


def mix64(x: int) -> int:
    """splitmix64 finalizer: one well-mixed 64-bit output for input x."""
    z = (x + _GOLD) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def combine(*values: int) -> int:
    """Fold integers into one 64-bit seed (order-sensitive)."""
    h = 0x243F6A8885A308D3  # pi fractional bits, arbitrary fixed offset
    for v in values:
        h = mix64((h + (v & _MASK)) & _MASK)
    return h


class SplitMix64:
    """Sequential splitmix64 stream."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GOLD) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return (z ^ (z >> 31)) & _MASK

    def next_double(self) -> float:
        """Uniform in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def next_below(self, n: int) -> int:
        """Uniform-ish integer in [0, n). Modulo bias is negligible for the
        small n used here and keeps the stream layout trivial to mirror."""
        return self.next_u64() % n
