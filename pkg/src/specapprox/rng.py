"""Seedable, platform-independent randomness.

Every stochastic operation in the package draws from a PCG64 stream built by
:func:`make_rng`. Normal variates are produced by the inverse-CDF transform of
open-interval uniforms rather than a rejection method, so a fixed seed
reproduces the same bits on any platform.
"""

import numpy as np
from scipy.special import ndtri

_U53 = 1 << 53


def make_rng(seed: int) -> np.random.Generator:
    """Return the package-wide generator (PCG64) for a 64-bit seed."""
    return np.random.Generator(np.random.PCG64(int(seed)))


def uniform_open(rng: np.random.Generator, size) -> np.ndarray:
    """Uniform draws strictly inside (0, 1) with 53-bit resolution."""
    return rng.integers(1, _U53, size=size).astype(np.float64) / _U53


def standard_normal(rng: np.random.Generator, size) -> np.ndarray:
    """Standard normal draws via inverse CDF of :func:`uniform_open`."""
    return ndtri(uniform_open(rng, size))
