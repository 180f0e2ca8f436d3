"""Streaming time averages of quadratic window observations.

Observers in this module consume state blocks from :func:`~dampedwave.simulate.simulate`
and accumulate quadrature approximations of integrals like

    J_T = (1/T) int_0^T <X(t), z>_V^2 dt

and its component versions.  Inner products live in spectral coordinates:
``<X1, z1> = sum_k sqrt(alpha_k) u_k z1_k`` (the f-coordinate of ``X1`` is
``sqrt(alpha_k) u_k``) and ``<X2, z2> = sum_k v_k z2_k``.

Accumulators are mergeable monoids backed by exactly rounded summation, so a
trajectory can be processed in chunks, split across workers, and reduced
without changing the result bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ._sums import ExactSum
from .model import SpectralConfig, Window
from .simulate import ModeState

__all__ = [
    "QUADRATURES",
    "inner_products",
    "QuadraticAccumulator",
    "ComponentAccumulators",
    "CrossWindowAccumulator",
    "FunctionalSnapshot",
    "SnapshotRecorder",
    "merge",
]

QUADRATURES = ("left_riemann", "trapezoid")


def inner_products(state: ModeState, cfg: SpectralConfig, w: Window) -> tuple[float, float]:
    """Window observation of one state: ``(<X1, z1>, <X2, z2>)``."""
    if state.n_modes != cfg.n_modes or w.n_modes != cfg.n_modes:
        raise ValueError("state, config, and window must agree on n_modes")
    first = float(np.dot(cfg.sqrt_alphas * state.u, w.z1))
    second = float(np.dot(state.v, w.z2))
    return first, second


class _IntegralBase:
    """Shared machinery: quadrature weights and exact running sums."""

    def __init__(self, quadrature: str):
        if quadrature not in QUADRATURES:
            raise ValueError(f"quadrature must be one of {QUADRATURES}, got {quadrature!r}")
        self.quadrature = quadrature
        self._elapsed = ExactSum()

    def _contributions(self, f: np.ndarray, dt: float) -> np.ndarray:
        # f has one more point than there are steps
        if self.quadrature == "left_riemann":
            return f[:-1] * dt
        return 0.5 * (f[:-1] + f[1:]) * dt

    @property
    def elapsed(self) -> float:
        return self._elapsed.value

    def _add_elapsed(self, n_steps: int, dt: float) -> None:
        self._elapsed.add_array(np.full(n_steps, dt))


class QuadraticAccumulator(_IntegralBase):
    """Running integral of the squared full-window observation ``<X, z>_V^2``."""

    def __init__(self, window: Window, cfg: SpectralConfig, quadrature: str = "left_riemann"):
        super().__init__(quadrature)
        if window.n_modes != cfg.n_modes:
            raise ValueError("window does not match n_modes")
        self.window = window
        self.cfg = cfg
        self._w1 = cfg.sqrt_alphas * window.z1
        self._w2 = window.z2.copy()
        self._integral = ExactSum()

    def observe_block(self, step0: int, dt: float, u: np.ndarray, v: np.ndarray) -> None:
        self.add_path(u, v, dt)

    def add_path(self, u: np.ndarray, v: np.ndarray, dt: float) -> None:
        """Accumulate over a path segment given as ``(m + 1, N)`` state rows."""
        if dt <= 0.0:
            raise ValueError("dt must be positive")
        ip = u @ self._w1 + v @ self._w2
        self._integral.add_array(self._contributions(ip * ip, dt))
        self._add_elapsed(u.shape[0] - 1, dt)

    @property
    def running_integral(self) -> float:
        return self._integral.value

    def time_average(self) -> float:
        """Current value of ``J_t`` (integral divided by elapsed time)."""
        return self._integral.value / self._elapsed.value

    def merge_from(self, other: "QuadraticAccumulator") -> None:
        if self.quadrature != other.quadrature or not (
            np.array_equal(self._w1, other._w1) and np.array_equal(self._w2, other._w2)
        ):
            raise ValueError("accumulators must share window and quadrature rule")
        self._integral.merge(other._integral)
        self._elapsed.merge(other._elapsed)

    def copy(self) -> "QuadraticAccumulator":
        out = QuadraticAccumulator(self.window, self.cfg, self.quadrature)
        out._integral = self._integral.copy()
        out._elapsed = self._elapsed.copy()
        return out


class ComponentAccumulators(_IntegralBase):
    """Component integrals of one window: j1, j2, and their cross average.

    ``j1`` averages ``<X1, z1>^2``, ``j2`` averages ``<X2, z2>^2`` and
    ``cross`` averages the product; the full-window average ``J`` is
    recovered as ``j1 + j2 + 2*cross``.
    """

    def __init__(self, window: Window, cfg: SpectralConfig, quadrature: str = "left_riemann"):
        super().__init__(quadrature)
        if window.n_modes != cfg.n_modes:
            raise ValueError("window does not match n_modes")
        self.window = window
        self.cfg = cfg
        self._w1 = cfg.sqrt_alphas * window.z1
        self._w2 = window.z2.copy()
        self._has1 = window.z1_nonzero
        self._has2 = window.z2_nonzero
        self._j1 = ExactSum()
        self._j2 = ExactSum()
        self._cross = ExactSum()

    def observe_block(self, step0: int, dt: float, u: np.ndarray, v: np.ndarray) -> None:
        self.add_path(u, v, dt)

    def add_path(self, u: np.ndarray, v: np.ndarray, dt: float) -> None:
        if dt <= 0.0:
            raise ValueError("dt must be positive")
        # components with a zero window contribute exact zeros; skip them
        if self._has1:
            i1 = u @ self._w1
            self._j1.add_array(self._contributions(i1 * i1, dt))
        if self._has2:
            i2 = v @ self._w2
            self._j2.add_array(self._contributions(i2 * i2, dt))
        if self._has1 and self._has2:
            self._cross.add_array(self._contributions(i1 * i2, dt))
        self._add_elapsed(u.shape[0] - 1, dt)

    @property
    def j1(self) -> float:
        return self._j1.value / self._elapsed.value

    @property
    def j2(self) -> float:
        return self._j2.value / self._elapsed.value

    @property
    def cross(self) -> float:
        return self._cross.value / self._elapsed.value

    def full_average(self) -> float:
        """Time average of the squared full-window observation."""
        return (self._j1.value + self._j2.value + 2.0 * self._cross.value) / self._elapsed.value

    def merge_from(self, other: "ComponentAccumulators") -> None:
        if self.quadrature != other.quadrature or not (
            np.array_equal(self._w1, other._w1) and np.array_equal(self._w2, other._w2)
        ):
            raise ValueError("accumulators must share window and quadrature rule")
        self._j1.merge(other._j1)
        self._j2.merge(other._j2)
        self._cross.merge(other._cross)
        self._elapsed.merge(other._elapsed)

    def copy(self) -> "ComponentAccumulators":
        out = ComponentAccumulators(self.window, self.cfg, self.quadrature)
        out._j1 = self._j1.copy()
        out._j2 = self._j2.copy()
        out._cross = self._cross.copy()
        out._elapsed = self._elapsed.copy()
        return out


class CrossWindowAccumulator(_IntegralBase):
    """Time average of the product of two full-window observations.

    Covers the vanishing cross terms: position/position for distinct modes,
    velocity/velocity for distinct modes, and position/velocity pairs.
    """

    def __init__(
        self,
        window_a: Window,
        window_b: Window,
        cfg: SpectralConfig,
        quadrature: str = "left_riemann",
    ):
        super().__init__(quadrature)
        if window_a.n_modes != cfg.n_modes or window_b.n_modes != cfg.n_modes:
            raise ValueError("windows do not match n_modes")
        self._wa1 = cfg.sqrt_alphas * window_a.z1
        self._wa2 = window_a.z2.copy()
        self._wb1 = cfg.sqrt_alphas * window_b.z1
        self._wb2 = window_b.z2.copy()
        self._product = ExactSum()

    def observe_block(self, step0: int, dt: float, u: np.ndarray, v: np.ndarray) -> None:
        ia = u @ self._wa1 + v @ self._wa2
        ib = u @ self._wb1 + v @ self._wb2
        self._product.add_array(self._contributions(ia * ib, dt))
        self._add_elapsed(u.shape[0] - 1, dt)

    def time_average(self) -> float:
        return self._product.value / self._elapsed.value


def merge(acc_a, acc_b):
    """Combine accumulators over adjacent spans into a new accumulator.

    ``acc_a`` must end where ``acc_b`` begins (the caller's responsibility);
    windows and quadrature rules must match.  The result is bit-identical to
    single-pass accumulation over the union.
    """
    out = acc_a.copy()
    out.merge_from(acc_b)
    return out


@dataclass(frozen=True)
class FunctionalSnapshot:
    """Component averages at one time point."""

    t: float
    j1: float
    j2: float
    cross: float

    @property
    def full(self) -> float:
        return self.j1 + self.j2 + 2.0 * self.cross


class SnapshotRecorder:
    """Wraps a :class:`ComponentAccumulators` and records averages on a stride.

    Snapshot values come from the exact accumulator state, so the recorded
    series is identical to what separate shorter runs would produce.
    """

    def __init__(self, accumulator: ComponentAccumulators, stride: int):
        if stride < 1:
            raise ValueError("stride must be >= 1")
        self.accumulator = accumulator
        self.stride = int(stride)
        self.snapshots: list[FunctionalSnapshot] = []
        self._last_recorded = -1
        self._last_seen = 0

    def observe_block(self, step0: int, dt: float, u: np.ndarray, v: np.ndarray) -> None:
        last = step0 + u.shape[0] - 1
        start = max(step0 + 1, self.stride)  # averages are undefined at t = 0
        hit = -(-start // self.stride) * self.stride
        pos = 0
        for step in range(hit, last + 1, self.stride):
            i = step - step0
            self.accumulator.add_path(u[pos : i + 1], v[pos : i + 1], dt)
            pos = i
            self._record(step, dt)
        if pos < u.shape[0] - 1:
            self.accumulator.add_path(u[pos:], v[pos:], dt)
        self._last_seen = last

    def _record(self, step: int, dt: float) -> None:
        acc = self.accumulator
        self.snapshots.append(FunctionalSnapshot(t=step * dt, j1=acc.j1, j2=acc.j2, cross=acc.cross))
        self._last_recorded = step

    def record_final(self, dt: float) -> None:
        """Append the current averages if the last stride point fell short."""
        if self._last_seen > self._last_recorded:
            self._record(self._last_seen, dt)

    def series(self) -> Iterable[FunctionalSnapshot]:
        return list(self.snapshots)
