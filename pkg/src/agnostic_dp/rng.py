"""
Splittable, seeded random streams.

A RandomStream is a value: a 64-bit seed plus a stream-id path. Every
operation that needs randomness builds a fresh numpy Generator from it,
so results depend only on (inputs, seed, stream-id). Subroutines get
their own child streams and never share a generator.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .exceptions import InvalidArgumentError

SEED_MASK = (1 << 64) - 1

# Child stream ids used by the learning pipelines.
SUBSAMPLE_STREAM = 1
RELABEL_STREAM = 2
BASE_STREAM = 3
RESAMPLE_STREAM = 4
QUERY_STREAM = 5


@dataclass(frozen=True)
class RandomStream:
    """
    Seeded random stream identified by (seed, stream_id).

    Attributes:
        seed: 64-bit seed of the whole run
        stream_id: path of child indices, () for the root stream
    """

    seed: int
    stream_id: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not 0 <= self.seed <= SEED_MASK:
            raise InvalidArgumentError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if any(k < 0 for k in self.stream_id):
            raise InvalidArgumentError(f"stream ids must be nonnegative, got {self.stream_id}")

    @classmethod
    def from_seed(cls, seed: int) -> "RandomStream":
        """Build a root stream, folding arbitrary integers into 64 bits."""
        return cls(seed=seed & SEED_MASK)

    def child(self, *keys: int) -> "RandomStream":
        """Return the sub-stream at ``stream_id + keys``."""
        return RandomStream(self.seed, self.stream_id + tuple(keys))

    def generator(self) -> np.random.Generator:
        """
        Build a fresh generator for this stream.

        Two calls return generators that produce identical draws.
        """
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=self.stream_id)
        return np.random.Generator(np.random.PCG64(seq))

    def __str__(self) -> str:
        path = ".".join(str(k) for k in self.stream_id) or "root"
        return f"{self.seed}/{path}"
