"""Exactly rounded streaming summation.

Long quadrature runs add ~1e7 small increments; plain accumulation drifts and
naive Kahan totals are not invariant under splitting a trajectory into chunks.
``ExactSum`` keeps the running total as a list of non-overlapping partials
(Shewchuk's algorithm), so the represented value is the exact real sum of all
increments. Totals are therefore bit-identical no matter how the increment
stream was chunked or merged, and ``value`` rounds once at the end.
"""

from __future__ import annotations

import math

import numpy as np

_SCALAR_CUTOFF = 64


def _add_partial(x: float, partials: list) -> None:
    """Incorporate one float into a list of non-overlapping partials."""
    i = 0
    for y in partials:
        if abs(x) < abs(y):
            x, y = y, x
        hi = x + y
        lo = y - (hi - x)
        if lo != 0.0:
            partials[i] = lo
            i += 1
        x = hi
    partials[i:] = [x]


def distill(values: np.ndarray) -> list:
    """Reduce an array to a short list of partials with the same exact sum.

    Pairwise two-sum passes (vectorised) shrink the array while preserving the
    exact total; the short remainder is folded with the scalar routine.
    """
    x = np.ascontiguousarray(values, dtype=np.float64).ravel()
    x = x[x != 0.0]
    stalled = 0
    while x.size > _SCALAR_CUTOFF and stalled < 3:
        if x.size % 2:
            x = np.append(x, 0.0)
        a = x[0::2]
        b = x[1::2]
        s = a + b
        bb = s - a
        err = (a - (s - bb)) + (b - bb)
        err = err[err != 0.0]
        combined = np.concatenate((s[s != 0.0], err))
        stalled = stalled + 1 if combined.size >= x.size else 0
        x = combined
    partials: list = []
    for v in x.tolist():
        _add_partial(v, partials)
    return partials


class ExactSum:
    """Streaming sum whose total is the correctly rounded exact sum."""

    __slots__ = ("_partials",)

    def __init__(self):
        self._partials: list = []

    def add(self, value: float) -> None:
        if value != 0.0:
            _add_partial(float(value), self._partials)

    def add_array(self, values: np.ndarray) -> None:
        for p in distill(values):
            _add_partial(p, self._partials)

    def merge(self, other: "ExactSum") -> None:
        for p in other._partials:
            _add_partial(p, self._partials)

    def copy(self) -> "ExactSum":
        out = ExactSum()
        out._partials = list(self._partials)
        return out

    @property
    def value(self) -> float:
        return math.fsum(self._partials)
