"""Seeded random streams and the two distributions the simulator draws from.

Streams are backed by numpy's PCG64 seeded through ``SeedSequence``; a
per-trace stream is obtained by appending the trace index to the spawn key,
so derivation is O(1) and independent of how many workers generate traces.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from itertools import accumulate

import numpy as np

from .errors import InvalidRateError, InvalidWeightsError

_BLOCK = 256
_MAX_SEED = 2**64 - 1


class RandomStream:
    """A single-owner stream of uniform doubles in [0, 1).

    Draws are taken from the generator in fixed-size blocks; the output
    sequence depends only on ``seed`` and ``key``.
    """

    __slots__ = ("seed", "key", "_gen", "_buf", "_pos")

    def __init__(self, seed: int, key: tuple[int, ...] = ()):
        seed = int(seed)
        if not 0 <= seed <= _MAX_SEED:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self.key = tuple(int(k) for k in key)
        ss = np.random.SeedSequence(entropy=seed, spawn_key=self.key)
        self._gen = np.random.Generator(np.random.PCG64(ss))
        self._buf: list[float] = []
        self._pos = 0

    def uniform01(self) -> float:
        pos = self._pos
        if pos == len(self._buf):
            self._buf = self._gen.random(_BLOCK).tolist()
            pos = 0
        self._pos = pos + 1
        return self._buf[pos]

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, key={self.key})"


def uniform01(stream: RandomStream) -> float:
    return stream.uniform01()


def derive_stream(master: RandomStream, trace_index: int) -> RandomStream:
    """Return the stream for trace ``trace_index`` under ``master``'s seed.

    The result does not depend on how much of ``master`` was consumed.
    """
    if trace_index < 0:
        raise ValueError("trace_index must be nonnegative")
    return RandomStream(master.seed, master.key + (trace_index,))


def _check_rate(rate: float) -> None:
    if not (rate > 0 and math.isfinite(rate)):
        raise InvalidRateError(f"rate must be positive and finite, got {rate!r}")


def exponential_from_uniform(u: float, rate: float) -> float:
    """Inverse transform of an Exp(rate) variate; u = 0 maps to 0."""
    _check_rate(rate)
    return -math.log1p(-u) / rate


def sample_exponential(stream: RandomStream, rate: float) -> float:
    _check_rate(rate)
    return -math.log1p(-stream.uniform01()) / rate


def discrete_from_uniform(u: float, weights) -> int:
    """Index picked by cumulative-sum inversion of ``u`` over ``weights``.

    Zero weights are allowed and never selected.
    """
    weights = list(weights)
    if not weights:
        raise InvalidWeightsError("weights must be non-empty")
    if any(not (w >= 0 and math.isfinite(w)) for w in weights):
        raise InvalidWeightsError(f"weights must be finite and nonnegative: {weights}")
    total = math.fsum(weights)
    if total <= 0:
        raise InvalidWeightsError("weights must not all be zero")
    return pick_index(u * total, list(accumulate(weights)), weights)


def pick_index(threshold: float, cumulative: list, weights) -> int:
    lo = bisect_right(cumulative, threshold)
    if lo == len(cumulative):
        # fsum total can exceed the naive running sum by an ulp
        lo = max(i for i, w in enumerate(weights) if w > 0)
    return lo


def sample_discrete(stream: RandomStream, weights) -> int:
    return discrete_from_uniform(stream.uniform01(), weights)
