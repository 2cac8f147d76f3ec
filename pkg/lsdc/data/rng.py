"""Seeded random state shared by every stochastic operation."""

from __future__ import annotations

import numpy as np

from lsdc.errors import ConfigError

_SEED_MASK = (1 << 64) - 1


class RngState:
    """Seedable counter-based random state.

    Wraps a numpy Generator driven by the Philox bit generator. Every stochastic
    operation in lsdc takes an RngState explicitly, so an identical seed and an
    identical call sequence give an identical output stream. An RngState must not
    be shared between concurrent callers; use spawn to derive independent ones.

    Args:
    ----
        seed (int): 64-bit seed.

    """

    def __init__(self, seed: int):
        """Initialise the RngState."""
        if seed < 0 or seed > _SEED_MASK:
            raise ConfigError(f"seed {seed} is not a 64-bit unsigned integer.", "seed")
        self._seed = int(seed)
        self._generator = np.random.Generator(np.random.Philox(self._seed))

    @property
    def seed(self) -> int:
        """Return the seed the state was created with."""
        return self._seed

    @property
    def generator(self) -> np.random.Generator:
        """Return the underlying numpy Generator."""
        return self._generator

    def spawn(self, n_children: int) -> list[RngState]:
        """Derive n_children independent states from this one.

        Consumes one draw per child from this state, so spawning is itself part
        of the deterministic call sequence.
        """
        seeds = self._generator.integers(0, _SEED_MASK, size=n_children, dtype=np.uint64)
        return [RngState(int(s)) for s in seeds]

    def sklearn_seed(self) -> int:
        """Draw a 31-bit seed for libraries that take an integer random_state."""
        return int(self._generator.integers(0, 2**31 - 1))

    def __repr__(self):
        """Return a string representation of the RngState."""
        return f"{self.__class__.__name__}(seed={self._seed})"
