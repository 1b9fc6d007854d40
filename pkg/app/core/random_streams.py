"""
Seeded random streams for reproducible parallel Monte Carlo.

A stream is identified by (master seed, index). Two streams with the same
identity produce identical output; distinct indices map to distinct
``SeedSequence`` spawn keys and behave as independent streams.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

# Spawn key reserved for the sample-learning phase of sample-based experiments
SAMPLE_STREAM_INDEX = 2**32


@dataclass
class RandomStream:
    """Single-owner wrapper around a numpy Generator for one (seed, index)."""

    seed: int
    index: int = 0
    path: Tuple[int, ...] = ()
    _generator: Optional[np.random.Generator] = field(default=None, init=False, repr=False)

    @property
    def generator(self) -> np.random.Generator:
        if self._generator is None:
            sequence = np.random.SeedSequence(
                entropy=self.seed & 0xFFFFFFFFFFFFFFFF,
                spawn_key=(self.index, *self.path),
            )
            self._generator = np.random.Generator(np.random.PCG64(sequence))
        return self._generator

    def substream(self, key: int) -> RandomStream:
        """Derive a child stream; output does not depend on parent consumption."""
        return RandomStream(self.seed, self.index, (*self.path, key))

    def random(self, size=None):
        return self.generator.random(size)

    def permutation(self, n: int) -> np.ndarray:
        return self.generator.permutation(n)

    def permuted_rows(self, rows: int, n: int) -> np.ndarray:
        """Independent uniform permutations of 0..n-1, one per row."""
        base = np.tile(np.arange(n), (rows, 1))
        return self.generator.permuted(base, axis=1)

    def multinomial(self, trials: int, probs, size=None) -> np.ndarray:
        return self.generator.multinomial(trials, probs, size=size)
