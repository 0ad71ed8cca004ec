"""Two-sided, counter-based noise paths.

A :class:`NoisePath` realizes one noise sample path together with the shift
that advances it in time.  Draws are a pure function of ``(seed, index)``:
the 64-bit counter ``seed + (index+1)*GOLDEN`` is scrambled with the
splitmix64 finalizer and the top 53 bits are mapped to a uniform value in
``[-1/2, 1/2)``.  Because a draw is random access in the index, shifting the
path by ``k`` steps is just an index offset, the two-sided time axis comes
for free, and results never depend on evaluation order or thread count.

All three implementations of the generator (pure-int here, vectorized numpy
in :func:`draws_array`, and the numba kernels in ``_kernels``) compute the
identical bit pattern; ``tests/test_noise.py`` pins them to each other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB
# distinct odd constants decouple the substream derivation from the draws
_SUB_A = 0xA0761D6478BD642F
_SUB_B = 0xE7037ED1A0B428DB

_INV_2_53 = 2.0 ** -53


def mix64(z: int) -> int:
    """splitmix64 finalizer (Stafford mix13) on a 64-bit integer."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * _MIX_A) & _MASK
    z = ((z ^ (z >> 27)) * _MIX_B) & _MASK
    return z ^ (z >> 31)


def _uniform_from_u64(u: int) -> float:
    # top 53 bits -> [0,1) exactly representable, then center
    return (u >> 11) * _INV_2_53 - 0.5


def derive_seed(seed: int, index: int) -> int:
    """Deterministic substream seed for e.g. one grid cell of a sweep."""
    return mix64(((seed ^ _SUB_A) + ((index + 1) * _SUB_B)) & _MASK)


def derive_seeds_array(seed: int, count: int) -> np.ndarray:
    """Vectorized ``[derive_seed(seed, 0), ..., derive_seed(seed, count-1)]``."""
    idx = np.arange(1, count + 1, dtype=np.uint64)
    z = np.uint64(seed ^ _SUB_A) + idx * np.uint64(_SUB_B)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX_A)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX_B)
    return z ^ (z >> np.uint64(31))


@dataclass(frozen=True)
class NoisePath:
    """Immutable two-sided noise path; ``draw(n)`` realizes the n-th kick.

    ``shift(k)`` returns the path seen by an observer k steps later, so
    ``shift(k).draw(n) == draw(n + k)`` exactly.
    """

    seed: int
    offset: int = 0

    def __post_init__(self) -> None:
        if not (0 <= self.seed < 1 << 64):
            object.__setattr__(self, "seed", self.seed & _MASK)

    def draw(self, n: int) -> float:
        """Uniform draw in [-1/2, 1/2), deterministic in (seed, n)."""
        counter = (self.seed + ((n + self.offset + 1) * GOLDEN)) & _MASK
        return _uniform_from_u64(mix64(counter))

    def draws(self, start: int, count: int) -> np.ndarray:
        """Vectorized ``[draw(start), ..., draw(start+count-1)]``."""
        return draws_array(self.seed, self.offset, start, count)

    def shift(self, k: int) -> "NoisePath":
        return NoisePath(self.seed, self.offset + k)

    def derive(self, index: int) -> "NoisePath":
        """Independent substream (fresh seed, zero offset) for a cell index."""
        return NoisePath(derive_seed(self.seed, index))


def draws_array(seed: int, offset: int, start: int, count: int) -> np.ndarray:
    """numpy implementation of the draw, bit-identical to NoisePath.draw."""
    if count < 0:
        raise ValueError("count must be >= 0")
    idx = np.arange(start + offset + 1, start + offset + 1 + count, dtype=np.int64)
    z = np.uint64(seed) + idx.astype(np.uint64) * np.uint64(GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX_A)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX_B)
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * _INV_2_53 - 0.5
