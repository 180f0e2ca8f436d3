"""Minimum-contrast estimators of the damping and stiffness parameters.

Every estimator is a pure function of accumulated time averages and known
spectral data.  Writing ``Q1 = sum_k lambda_k z1_k^2`` and
``Q2 = sum_k lambda_k z2_k^2`` for the noise quadratic forms of a window and
``J_T``, ``j1``, ``j2`` for the accumulated averages, the estimators match
each observed average to its ergodic limit:

    abar_general:  Q1/(4 b J_T) + Q2/(4 J_T)          (b known)
    bbar_general:  Q1 / (4 a J_T - Q2)                (a known)
    abar_z2:       Q2 / (4 j2)
    bbar_z1z2:     (Q1/Q2) * (j2/j1)
    bbar_z1_a:     Q1 / (4 a j1)                      (a known)

Coordinate windows specialise these: ``abar_k`` is ``abar_z2`` on ``e_k``
and ``bbar_jk`` is ``bbar_z1z2`` on ``(f_j, e_k)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import DegenerateObservationError, InvalidWindowError, UnstableEstimateError
from .functionals import FunctionalSnapshot
from .model import ModelParams, SpectralConfig, Window, q_form

__all__ = [
    "ESTIMATOR_KINDS",
    "Estimate",
    "EstimatorSpec",
    "abar_general",
    "bbar_general",
    "abar_z2",
    "abar_k",
    "bbar_z1z2",
    "bbar_jk",
    "bbar_z1_a",
    "estimator_time_series",
]

ESTIMATOR_KINDS = (
    "abar_general",
    "bbar_general",
    "abar_z2",
    "bbar_z1z2",
    "abar_k",
    "bbar_jk",
    "bbar_z1_a",
)


@dataclass(frozen=True)
class Estimate:
    """A single estimator evaluation at a finite horizon."""

    value: float
    kind: str
    window_desc: str
    horizon: float


def _coords(cfg: SpectralConfig, coords) -> np.ndarray:
    arr = np.asarray(coords, dtype=np.float64)
    if arr.shape != (cfg.n_modes,):
        raise ValueError("coordinate vector does not match n_modes")
    return arr


def abar_general(j_total: float, w: Window, cfg: SpectralConfig, b_known: float) -> float:
    """Damping estimate from the full-window average, stiffness known."""
    if w.is_zero:
        raise InvalidWindowError("window must be nonzero")
    if b_known <= 0.0:
        raise ValueError("b_known must be positive")
    if not j_total > 0.0:
        raise DegenerateObservationError(f"full-window average must be positive, got {j_total}")
    q1 = q_form(cfg, w.z1)
    q2 = q_form(cfg, w.z2)
    return q1 / (4.0 * b_known * j_total) + q2 / (4.0 * j_total)


def bbar_general(j_total: float, w: Window, cfg: SpectralConfig, a_known: float) -> float:
    """Stiffness estimate from the full-window average, damping known.

    The denominator ``4 a J_T - Q2`` is positive in the limit but can be
    nonpositive at finite horizons; that case raises rather than clamps so
    Monte Carlo statistics stay unbiased.
    """
    if not w.z1_nonzero:
        raise InvalidWindowError("first window component must be nonzero")
    if a_known <= 0.0:
        raise ValueError("a_known must be positive")
    q1 = q_form(cfg, w.z1)
    q2 = q_form(cfg, w.z2)
    denom = 4.0 * a_known * j_total - q2
    if not denom > 0.0:
        raise UnstableEstimateError(
            f"4*a*J_T - Q2 = {denom:.6g} is not positive at this horizon"
        )
    return q1 / denom


def abar_z2(j2: float, z2_coords, cfg: SpectralConfig) -> float:
    """Damping estimate from the velocity component average ``j2``."""
    z2 = _coords(cfg, z2_coords)
    if not np.any(z2 != 0.0):
        raise InvalidWindowError("z2 must be nonzero")
    if not j2 > 0.0:
        raise DegenerateObservationError(f"j2 must be positive, got {j2}")
    return q_form(cfg, z2) / (4.0 * j2)


def abar_k(j2: float, k: int, cfg: SpectralConfig) -> float:
    """Damping estimate from one velocity coordinate: ``lambda_k / (4 j2)``."""
    w = Window.velocity_mode(k, cfg.n_modes)
    return abar_z2(j2, w.z2, cfg)


def bbar_z1z2(j1: float, j2: float, z1_coords, z2_coords, cfg: SpectralConfig) -> float:
    """Stiffness estimate combining both component averages (strategy three)."""
    z1 = _coords(cfg, z1_coords)
    z2 = _coords(cfg, z2_coords)
    if not np.any(z1 != 0.0):
        raise InvalidWindowError("z1 must be nonzero")
    if not np.any(z2 != 0.0):
        raise InvalidWindowError("z2 must be nonzero")
    if not j1 > 0.0:
        raise DegenerateObservationError(f"j1 must be positive, got {j1}")
    return (q_form(cfg, z1) / q_form(cfg, z2)) * (j2 / j1)


def bbar_jk(j1: float, j2: float, j: int, k: int, cfg: SpectralConfig) -> float:
    """Stiffness estimate from coordinates: ``(lambda_j/lambda_k) * (j2/j1)``."""
    wj = Window.position_mode(j, cfg.n_modes)
    wk = Window.velocity_mode(k, cfg.n_modes)
    return bbar_z1z2(j1, j2, wj.z1, wk.z2, cfg)


def bbar_z1_a(j1: float, z1_coords, cfg: SpectralConfig, a_known: float) -> float:
    """Stiffness estimate from the position component, damping known."""
    z1 = _coords(cfg, z1_coords)
    if not np.any(z1 != 0.0):
        raise InvalidWindowError("z1 must be nonzero")
    if a_known <= 0.0:
        raise ValueError("a_known must be positive")
    if not j1 > 0.0:
        raise DegenerateObservationError(f"j1 must be positive, got {j1}")
    return q_form(cfg, z1) / (4.0 * a_known * j1)


@dataclass(frozen=True)
class EstimatorSpec:
    """Which estimator to evaluate and on which window.

    Coordinate kinds (``abar_k``, ``bbar_jk``) take mode indices ``j``/``k``;
    window kinds take explicit coordinate vectors.  ``bbar_z1_a`` accepts
    either a mode index ``j`` (window ``f_j``) or a ``z1`` vector.
    """

    kind: str
    j: Optional[int] = None
    k: Optional[int] = None
    z1: Optional[tuple] = None
    z2: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in ESTIMATOR_KINDS:
            raise ValueError(f"unknown estimator kind {self.kind!r}")
        need = {
            "abar_general": ("window",),
            "bbar_general": ("window",),
            "abar_z2": ("z2",),
            "bbar_z1z2": ("z1", "z2"),
            "abar_k": ("k",),
            "bbar_jk": ("j", "k"),
            "bbar_z1_a": ("j_or_z1",),
        }[self.kind]
        if "k" in need and self.k is None:
            raise ValueError(f"{self.kind} requires a mode index k")
        if "j" in need and self.j is None:
            raise ValueError(f"{self.kind} requires a mode index j")
        if "z1" in need and self.z1 is None:
            raise ValueError(f"{self.kind} requires z1 coordinates")
        if "z2" in need and self.z2 is None:
            raise ValueError(f"{self.kind} requires z2 coordinates")
        if "window" in need and self.z1 is None and self.z2 is None:
            raise ValueError(f"{self.kind} requires z1 and/or z2 coordinates")
        if "j_or_z1" in need and self.j is None and self.z1 is None:
            raise ValueError(f"{self.kind} requires a mode index j or z1 coordinates")
        for name in ("z1", "z2"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, tuple(float(x) for x in value))

    @property
    def label(self) -> str:
        if self.kind == "abar_k":
            return f"abar_k{self.k}"
        if self.kind == "bbar_jk":
            return f"bbar_j{self.j}_k{self.k}"
        if self.kind == "bbar_z1_a" and self.j is not None:
            return f"bbar_j{self.j}_a"
        return self.kind

    @property
    def estimates_parameter(self) -> str:
        return "a" if self.kind.startswith("abar") else "b"

    def window(self, cfg: SpectralConfig) -> Window:
        """Observation window the estimator's averages are taken over."""
        n = cfg.n_modes
        if self.kind == "abar_k":
            return Window.velocity_mode(self.k, n)
        if self.kind == "bbar_jk":
            return Window(Window.position_mode(self.j, n).z1, Window.velocity_mode(self.k, n).z2)
        if self.kind == "bbar_z1_a" and self.z1 is None:
            return Window.position_mode(self.j, n)
        z1 = np.zeros(n) if self.z1 is None else _coords(cfg, np.asarray(self.z1))
        z2 = np.zeros(n) if self.z2 is None else _coords(cfg, np.asarray(self.z2))
        return Window(z1, z2)

    def evaluate(self, cfg: SpectralConfig, params_known: ModelParams, j1: float, j2: float, cross: float) -> float:
        """Apply the estimator formula to accumulated component averages.

        ``params_known`` supplies the known parameter for the kinds that
        need one (``abar_general`` uses ``b``; ``bbar_general`` and
        ``bbar_z1_a`` use ``a``).
        """
        w = self.window(cfg)
        if self.kind in ("abar_general", "bbar_general"):
            j_total = j1 + j2 + 2.0 * cross
            if self.kind == "abar_general":
                return abar_general(j_total, w, cfg, params_known.b)
            return bbar_general(j_total, w, cfg, params_known.a)
        if self.kind in ("abar_z2", "abar_k"):
            return abar_z2(j2, w.z2, cfg)
        if self.kind in ("bbar_z1z2", "bbar_jk"):
            return bbar_z1z2(j1, j2, w.z1, w.z2, cfg)
        return bbar_z1_a(j1, w.z1, cfg, params_known.a)


def estimator_time_series(
    snapshots: Iterable[FunctionalSnapshot],
    spec: EstimatorSpec,
    cfg: SpectralConfig,
    params_known: ModelParams,
) -> list[tuple[float, float]]:
    """Evaluate one estimator along a snapshot stream.

    Points where the estimator is undefined (degenerate or unstable
    denominators) are recorded as NaN rather than dropped or interpolated.
    """
    series = []
    for snap in snapshots:
        try:
            value = spec.evaluate(cfg, params_known, snap.j1, snap.j2, snap.cross)
        except (DegenerateObservationError, UnstableEstimateError):
            value = math.nan
        series.append((snap.t, value))
    return series
