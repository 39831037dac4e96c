"""Deterministic random-number plumbing.

Every stochastic routine in the package draws from a counter-based
generator (numpy's Philox) whose key is derived from user-visible
integers (master seed, trial index, shard index) through the splitmix64
finalizer.  Streams for distinct indices are therefore independent and
reproducible regardless of execution order, which is what makes
trial-parallel runs bit-stable.
"""

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """One application of the splitmix64 output finalizer (64-bit)."""
    z = (x + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def derive_key(seed: int, index: int) -> int:
    """Mix (seed, index) into a single 64-bit stream key."""
    return splitmix64((seed + index * _GOLDEN) & _MASK64)


def stream(seed: int, index: int = 0) -> np.random.Generator:
    """Counter-based generator for stream `index` under `seed`."""
    return np.random.Generator(np.random.Philox(key=derive_key(seed, index)))


def complex_gaussians(rng: np.random.Generator, shape, variance: float) -> np.ndarray:
    """Complex Gaussians with independent N(0, variance/2) real and
    imaginary parts, via the Box-Muller transform.

    Box-Muller (rather than the generator's own ziggurat normals) keeps
    the uniform-draw count per entry fixed, so streams stay aligned
    across numpy versions.
    """
    # 1 - U keeps the argument of log inside (0, 1].
    u1 = 1.0 - rng.random(shape)
    u2 = rng.random(shape)
    radius = np.sqrt(-variance * np.log(u1))
    return radius * np.exp(2j * np.pi * u2)
