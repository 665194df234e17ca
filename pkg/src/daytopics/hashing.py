"""Pinned deterministic hashing and pseudo-random unit vectors.

Every seeded computation in the toolkit that must be reproducible across
implementations goes through the two primitives below, both published and
easy to reimplement anywhere:

- ``hash64(seed, key)``: FNV-1a (64-bit) over the 8 little-endian bytes of
  ``seed`` (two's complement) followed by the UTF-8 bytes of ``key``.
- stream values: the splitmix64 finalizer applied to states
  ``h + i * 0x9E3779B97F4A7C15 (mod 2**64)`` for ``i = 1..n``, where ``h``
  is a ``hash64`` output.

Floats are built from the top 53 bits of each stream value, mapped to
``[-1, 1)``; unit vectors are those floats L2-normalized.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

_NP_GOLDEN = np.uint64(_GOLDEN)
_NP_MIX1 = np.uint64(_MIX1)
_NP_MIX2 = np.uint64(_MIX2)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV_2_53 = float(2.0**-53)


def hash64(seed: int, key: str) -> int:
    """64-bit FNV-1a over the seed bytes followed by the UTF-8 key bytes."""
    h = _FNV_OFFSET
    for b in (seed & MASK64).to_bytes(8, "little") + key.encode("utf-8"):
        h ^= b
        h = (h * _FNV_PRIME) & MASK64
    return h


def splitmix64(state: int) -> int:
    """The i-th output of splitmix64 seeded at ``state - i*GOLDEN``; here one step."""
    z = (state + _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def _mix_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _S30)) * _NP_MIX1
    z = (z ^ (z >> _S27)) * _NP_MIX2
    return z ^ (z >> _S31)


def uniform_stream(state: int, n: int) -> np.ndarray:
    """``n`` floats in ``[-1, 1)`` from the splitmix64 stream at ``state``."""
    steps = np.arange(1, n + 1, dtype=np.uint64) * _NP_GOLDEN
    z = _mix_array(np.uint64(state & MASK64) + steps)
    u = (z >> _S11).astype(np.float64) * _INV_2_53
    return 2.0 * u - 1.0


def unit_vectors(states: np.ndarray, dim: int) -> np.ndarray:
    """One L2-normalized row of ``dim`` stream floats per entry of ``states``."""
    states = np.asarray(states, dtype=np.uint64).reshape(-1)
    steps = np.arange(1, dim + 1, dtype=np.uint64) * _NP_GOLDEN
    z = _mix_array(states[:, None] + steps[None, :])
    u = (z >> _S11).astype(np.float64) * _INV_2_53
    x = 2.0 * u - 1.0
    norms = np.sqrt(np.einsum("ij,ij->i", x, x))
    norms[norms == 0.0] = 1.0
    return x / norms[:, None]


def unit_vector(seed: int, key: str, dim: int) -> np.ndarray:
    """Deterministic pseudo-random unit vector for ``(seed, key)``."""
    return unit_vectors(np.array([hash64(seed, key)], dtype=np.uint64), dim)[0]


def derive_seed(seed: int, key: str) -> int:
    """Stable sub-seed for independent per-day / per-stage generators."""
    return hash64(seed, key)
