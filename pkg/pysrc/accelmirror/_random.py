"""Seeded random stream used to build reproducible problem instances."""

from __future__ import annotations

from typing import Any, Final

import numpy as np

from ._common import ConfigError, FloatArray

PRNG_ID: Final[str] = "numpy.random.PCG64/v1"
NORMAL_SAMPLER_ID: Final[str] = (
    "box-muller/v1: u1=1-U0, u2=U1; n0=sqrt(-2 ln u1) cos(2 pi u2), "
    "n1=sqrt(-2 ln u1) sin(2 pi u2); pairs emitted in order, last odd sample dropped"
)
_MAX_SEED: Final[int] = 2**64


class SeededStream:
    """
    A named, versioned 64-bit random stream.

    Uniform draws come straight from ``PCG64`` doubles in ``[0, 1)``. Normal
    draws use the Box-Muller transform on that same uniform stream (not numpy's
    ziggurat), so an instance can be rebuilt from the metadata alone.

    Example:
        ```python
        stream = SeededStream(7)
        B = stream.normal(50 * 50).reshape(50, 50)
        ```
    """

    __slots__ = ("_gen", "_seed")

    def __init__(self, seed: int):
        if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
            raise ConfigError(f"seed must be an integer, got {seed!r}")
        seed = int(seed)
        if not 0 <= seed < _MAX_SEED:
            raise ConfigError(f"seed must fit in 64 unsigned bits, got {seed}")
        self._seed = seed
        self._gen = np.random.Generator(np.random.PCG64(seed))

    @property
    def seed(self) -> int:
        return self._seed

    def uniform(self, size: int) -> FloatArray:
        """Draw ``size`` doubles uniformly from ``[0, 1)``."""
        return self._gen.random(size)

    def normal(self, size: int) -> FloatArray:
        """Draw ``size`` standard normals with the Box-Muller transform."""
        pairs = (size + 1) // 2
        u = self._gen.random(2 * pairs).reshape(pairs, 2)
        radius = np.sqrt(-2.0 * np.log(1.0 - u[:, 0]))
        angle = 2.0 * np.pi * u[:, 1]
        out = np.empty((pairs, 2), dtype=np.float64)
        out[:, 0] = radius * np.cos(angle)
        out[:, 1] = radius * np.sin(angle)
        return out.reshape(-1)[:size]

    def describe(self) -> dict[str, Any]:
        """Metadata block identifying the generator and sampler."""
        return {"prng": PRNG_ID, "normal_sampler": NORMAL_SAMPLER_ID, "seed": self._seed}
