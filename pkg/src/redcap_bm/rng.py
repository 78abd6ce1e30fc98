"""Seeded random streams with per-trial derivation."""
from __future__ import annotations

import numpy as np


class RandomStream:
    """Thin wrapper over ``numpy.random.Generator``.

    Every Monte Carlo trial owns its own stream derived from
    ``(seed, trial index)``, so results do not depend on how trials are
    scheduled across workers.
    """

    def __init__(self, seed: int, key: tuple[int, ...] = ()):
        self.seed = int(seed)
        self.key = tuple(int(k) for k in key)
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=self.key)
        self._gen = np.random.Generator(np.random.PCG64(ss))

    @classmethod
    def for_trial(cls, seed: int, index: int) -> RandomStream:
        return cls(seed, (index,))

    def uniform(self, low=0.0, high=1.0, size=None):
        return self._gen.uniform(low, high, size)

    def exponential(self, size=None):
        return self._gen.standard_exponential(size)

    def normal(self, size=None):
        return self._gen.standard_normal(size)

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, key={self.key})"
