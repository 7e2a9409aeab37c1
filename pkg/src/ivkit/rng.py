"""Deterministic random-number plumbing.

Streams are built on the counter-based Philox generator, with standard
normal variates produced by inverse-CDF transform of open-interval
uniforms.  This keeps every draw a pure function of (seed, position), so
results cannot depend on batching or thread scheduling.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One step of the splitmix64 mixing function (64-bit avalanche)."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def mix_seed(seed: int, index: int) -> int:
    """Derive an independent per-replicate seed from a base seed.

    XOR with the mixed index keeps the mapping stable no matter how the
    replicates are scheduled across threads.
    """
    return (seed ^ splitmix64(index)) & _MASK64


def make_generator(seed: int) -> np.random.Generator:
    if not 0 <= seed <= _MASK64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return np.random.Generator(np.random.Philox(key=seed))


def uniform_open(gen: np.random.Generator, n: int) -> np.ndarray:
    """Uniforms strictly inside (0, 1): bin centers of a 2^53 grid."""
    return (gen.integers(0, 1 << 53, size=n, dtype=np.uint64) + 0.5) * 2.0**-53


def normal_draws(gen: np.random.Generator, n: int) -> np.ndarray:
    """Standard normal variates via the inverse normal CDF."""
    return ndtri(uniform_open(gen, n))
