"""Seeded uniform streams with an observable draw counter.

The seed-to-stream mapping is frozen as follows:

* ``SeedSequence(seed)`` (or ``SeedSequence(seed, spawn_key=(stream,))`` for a
  substream) seeds numpy's ``PCG64`` bit generator;
* each raw 64-bit output ``w`` becomes the double ``(w >> 11) * 2**-53``,
  which is what ``numpy.random.Generator.random`` computes.

Values therefore lie on the 2**-53 grid in ``[0, 1)`` and are never 1. The
period of PCG64 is 2**128.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np
from numpy.random import PCG64, Generator, SeedSequence

__all__ = ["UniformSource", "ReplaySource", "SourceExhaustedError", "substream"]

_BLOCK = 1024
_SEED_MAX = 2**64 - 1


class SourceExhaustedError(RuntimeError):
    """A replay source ran out of recorded values."""


class UniformSource:
    """Deterministic stream of uniforms on [0, 1).

    ``draw_count`` counts values handed out, not values generated: the
    internal read-ahead buffer is invisible to callers, which lets batch
    kernels look at a block with :meth:`peek` and consume only part of it.

    A source is single-owner. Do not draw from one source in two threads.
    """

    def __init__(self, seed: int = 0, stream: int | None = None):
        if not 0 <= seed <= _SEED_MAX:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self.stream = stream
        if stream is None:
            ss = SeedSequence(seed)
        else:
            if stream < 0:
                raise ValueError(f"stream index must be non-negative, got {stream}")
            ss = SeedSequence(seed, spawn_key=(stream,))
        self._gen = Generator(PCG64(ss))
        self._buf = np.empty(0)
        self._pos = 0
        self.draw_count = 0

    def __repr__(self):
        return f"{type(self).__name__}(seed={self.seed}, stream={self.stream}, draw_count={self.draw_count})"

    def _produce(self, k: int) -> np.ndarray:
        return self._gen.random(k)

    def _ensure(self, k: int) -> None:
        avail = self._buf.size - self._pos
        if avail >= k:
            return
        fresh = self._produce(max(k - avail, _BLOCK))
        self._buf = np.concatenate((self._buf[self._pos:], fresh))
        self._pos = 0
        if self._buf.size < k:
            raise SourceExhaustedError(f"need {k} values, only {self._buf.size} left")

    def random(self) -> float:
        """Return the next uniform and advance the counter by one."""
        self._ensure(1)
        v = float(self._buf[self._pos])
        self._pos += 1
        self.draw_count += 1
        return v

    def peek(self, k: int) -> np.ndarray:
        """Read-only view of the next ``k`` values; nothing is consumed."""
        self._ensure(k)
        view = self._buf[self._pos:self._pos + k]
        view.flags.writeable = False
        return view

    def peek_upto(self, k: int) -> np.ndarray:
        """Like :meth:`peek` but returns fewer values if the source runs dry."""
        try:
            self._ensure(k)
        except SourceExhaustedError:
            pass
        k = min(k, self._buf.size - self._pos)
        return self.peek(k)

    def skip(self, k: int) -> None:
        """Consume ``k`` values previously inspected with :meth:`peek`."""
        self._ensure(k)
        self._pos += k
        self.draw_count += k

    def take(self, k: int) -> np.ndarray:
        """Consume and return the next ``k`` values as a fresh array."""
        if self._pos == self._buf.size and k >= _BLOCK:
            out = self._produce(k)
            if out.size < k:
                raise SourceExhaustedError(f"need {k} values, only {out.size} left")
            self.draw_count += k
            return out
        out = self.peek(k).copy()
        self.skip(k)
        return out


class ReplaySource(UniformSource):
    """A source that plays back a fixed list of values.

    Used to drive samplers through hand-traced examples.
    """

    def __init__(self, values: Iterable[float]):
        vals = np.asarray(list(values), dtype=np.float64)
        if vals.ndim != 1:
            raise ValueError("replay values must be a flat sequence")
        if vals.size and (np.any(vals < 0.0) or np.any(vals >= 1.0) or not np.all(np.isfinite(vals))):
            raise ValueError("replay values must lie in [0, 1)")
        self.seed = None
        self.stream = None
        self._buf = vals
        self._pos = 0
        self.draw_count = 0
        self._gen = None

    def __repr__(self):
        return f"ReplaySource(remaining={self.remaining}, draw_count={self.draw_count})"

    @property
    def remaining(self) -> int:
        return self._buf.size - self._pos

    def _produce(self, k: int) -> np.ndarray:
        return np.empty(0)


def substream(seed: int, index: int) -> UniformSource:
    """Source for worker/shard ``index`` of base ``seed``."""
    return UniformSource(seed, stream=index)
