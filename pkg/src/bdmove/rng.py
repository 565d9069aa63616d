"""Counter-based random streams.

Every trajectory owns three independent substreams (waiting times, kernel
choices, move noise) derived from a single top-level seed and a trajectory
counter, so that changing how much noise one consumer draws never perturbs
the draws seen by the others.
"""
from __future__ import annotations

import numpy as np

STREAM_WAIT = 0
STREAM_KERNEL = 1
STREAM_MOVE = 2

_MASK64 = (1 << 64) - 1


def substream(seed: int, trajectory: int = 0, stream: int = STREAM_WAIT) -> np.random.Generator:
    """Generator keyed by (seed, trajectory, stream); counter-based, no state shared."""
    key = np.array(
        [np.uint64(seed & _MASK64), np.uint64(((trajectory << 2) | stream) & _MASK64)],
        dtype=np.uint64,
    )
    return np.random.Generator(np.random.Philox(key=key))


class Stream:
    """Buffered scalar draws over one substream.

    Scalar uniforms and unit exponentials are drawn in blocks to keep the
    per-event cost of the simulation loop low. The consumption order is a
    fixed function of the call sequence, so runs stay reproducible.
    """

    __slots__ = ("gen", "_block", "_uni", "_ui", "_exp", "_ei")

    def __init__(self, gen: np.random.Generator, block: int = 512):
        self.gen = gen
        self._block = block
        # buffers fill lazily so unused draw kinds never touch the generator
        self._uni = None
        self._ui = block
        self._exp = None
        self._ei = block

    def uniform(self) -> float:
        if self._ui >= self._block:
            self._uni = self.gen.uniform(size=self._block)
            self._ui = 0
        u = self._uni[self._ui]
        self._ui += 1
        return u

    def exponential(self) -> float:
        """One standard Exp(1) draw; callers scale by 1/rate."""
        if self._ei >= self._block:
            self._exp = self.gen.standard_exponential(size=self._block)
            self._ei = 0
        e = self._exp[self._ei]
        self._ei += 1
        return e

    def normals(self, shape) -> np.ndarray:
        return self.gen.standard_normal(shape)

    def integer(self, n: int) -> int:
        return int(self.gen.integers(0, n))


def as_stream(rng) -> Stream:
    """Accept either a Stream or a bare numpy Generator."""
    return rng if isinstance(rng, Stream) else Stream(rng)
