"""Parametric model, spectral data, windows, and the stationary covariance.

The damped second-order equation is diagonalised over the eigenbasis
``{e_n}`` of the negative spatial operator (eigenvalues ``alpha_n``) with
noise eigenvalues ``lambda_n`` on the same basis.  Each mode is then the
autonomous pair ``(u_n, v_n)`` with drift matrix ``[[0, 1], [-b*alpha_n,
-2a]]`` and noise intensity ``sqrt(lambda_n)`` acting on the velocity.

Observation windows ``z = (z1, z2)`` live in the product space
``Dom((-A)^(1/2)) x L2``: ``z1`` is stored in coordinates of the orthonormal
basis ``f_n = e_n / sqrt(alpha_n)`` of the first factor, ``z2`` in plain
``e_n`` coordinates.  Every estimator and variance formula downstream is
written in these coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ModelParams",
    "SpectralConfig",
    "Window",
    "InitialCondition",
    "dirichlet_eigenvalues",
    "inverse_square_lambdas",
    "d_denominator",
    "q_form",
    "q_infinity_quadratic_form",
    "q_infinity_general_quadratic_form",
    "stationary_mode_covariance",
    "mode_drift_matrix",
]


@dataclass(frozen=True)
class ModelParams:
    """Damping coefficient ``a`` and stiffness coefficient ``b``, both > 0."""

    a: float
    b: float

    def __post_init__(self):
        for name in ("a", "b"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"parameter {name} must be finite and > 0, got {value!r}")


def _as_vector(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a 1-d vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must contain only finite entries")
    return arr


@dataclass(frozen=True)
class SpectralConfig:
    """Truncation level with eigenvalues of the spatial and noise operators.

    ``alphas`` must be strictly increasing and positive; ``lambdas`` must be
    positive (summability of the full sequence is the caller's modelling
    responsibility and cannot be checked at finite truncation).
    """

    n_modes: int
    alphas: np.ndarray
    lambdas: np.ndarray

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValueError("n_modes must be >= 1")
        alphas = _as_vector(self.alphas, "alphas")
        lambdas = _as_vector(self.lambdas, "lambdas")
        if alphas.shape[0] != self.n_modes or lambdas.shape[0] != self.n_modes:
            raise ValueError("alphas and lambdas must have length n_modes")
        if not np.all(alphas > 0.0):
            raise ValueError("all alphas must be positive")
        if not np.all(np.diff(alphas) > 0.0):
            raise ValueError("alphas must be strictly increasing")
        if not np.all(lambdas > 0.0):
            raise ValueError("all lambdas must be positive")
        alphas.flags.writeable = False
        lambdas.flags.writeable = False
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "lambdas", lambdas)

    @property
    def sqrt_alphas(self) -> np.ndarray:
        return np.sqrt(self.alphas)


@dataclass(frozen=True)
class Window:
    """Observation window ``(z1, z2)``.

    ``z1`` holds coordinates with respect to the ``f_k`` basis, ``z2`` with
    respect to the ``e_k`` basis.  The L2 coordinates of the first component
    are ``z1 / sqrt(alpha)`` since ``f_k = e_k / sqrt(alpha_k)``.
    """

    z1: np.ndarray
    z2: np.ndarray

    def __post_init__(self):
        z1 = _as_vector(self.z1, "z1")
        z2 = _as_vector(self.z2, "z2")
        if z1.shape != z2.shape:
            raise ValueError("z1 and z2 must have the same length")
        z1.flags.writeable = False
        z2.flags.writeable = False
        object.__setattr__(self, "z1", z1)
        object.__setattr__(self, "z2", z2)

    @property
    def n_modes(self) -> int:
        return self.z1.shape[0]

    @property
    def z1_nonzero(self) -> bool:
        return bool(np.any(self.z1 != 0.0))

    @property
    def z2_nonzero(self) -> bool:
        return bool(np.any(self.z2 != 0.0))

    @property
    def is_zero(self) -> bool:
        return not (self.z1_nonzero or self.z2_nonzero)

    def z1_l2_coords(self, cfg: SpectralConfig) -> np.ndarray:
        """Coordinates of the first component in the ``e_k`` basis."""
        _check_window(cfg, self)
        return self.z1 / cfg.sqrt_alphas

    @staticmethod
    def zero(n_modes: int) -> "Window":
        return Window(np.zeros(n_modes), np.zeros(n_modes))

    @staticmethod
    def position_mode(j: int, n_modes: int) -> "Window":
        """Window ``(f_j, 0)`` observing one position coordinate."""
        if not 1 <= j <= n_modes:
            raise ValueError(f"mode index {j} out of range 1..{n_modes}")
        z1 = np.zeros(n_modes)
        z1[j - 1] = 1.0
        return Window(z1, np.zeros(n_modes))

    @staticmethod
    def velocity_mode(k: int, n_modes: int) -> "Window":
        """Window ``(0, e_k)`` observing one velocity coordinate."""
        if not 1 <= k <= n_modes:
            raise ValueError(f"mode index {k} out of range 1..{n_modes}")
        z2 = np.zeros(n_modes)
        z2[k - 1] = 1.0
        return Window(np.zeros(n_modes), z2)


@dataclass(frozen=True)
class InitialCondition:
    """Initial coordinates of position (``u0``) and velocity (``v0``)."""

    u0: np.ndarray
    v0: np.ndarray

    def __post_init__(self):
        u0 = _as_vector(self.u0, "u0")
        v0 = _as_vector(self.v0, "v0")
        if u0.shape != v0.shape:
            raise ValueError("u0 and v0 must have the same length")
        u0.flags.writeable = False
        v0.flags.writeable = False
        object.__setattr__(self, "u0", u0)
        object.__setattr__(self, "v0", v0)

    @staticmethod
    def zero(n_modes: int) -> "InitialCondition":
        return InitialCondition(np.zeros(n_modes), np.zeros(n_modes))

    @staticmethod
    def constant(n_modes: int, u: float = 1.0, v: float = 1.0) -> "InitialCondition":
        return InitialCondition(np.full(n_modes, float(u)), np.full(n_modes, float(v)))


def dirichlet_eigenvalues(n_modes: int) -> np.ndarray:
    """Eigenvalues ``n^2 pi^2`` of the negative Dirichlet Laplacian on (0, 1)."""
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    n = np.arange(1, n_modes + 1, dtype=np.float64)
    return n * n * math.pi * math.pi


def inverse_square_lambdas(n_modes: int, scale: float = 1000.0) -> np.ndarray:
    """Summable noise eigenvalues ``scale / n^2`` (the reference spectrum)."""
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    n = np.arange(1, n_modes + 1, dtype=np.float64)
    return scale / (n * n)


def d_denominator(params: ModelParams, alpha_k, alpha_l):
    """Recurring denominator ``b(alpha_k - alpha_l)^2 + 8a^2(alpha_k + alpha_l)``.

    Symmetric in its last two arguments and strictly positive; equals
    ``16 a^2 alpha_k`` on the diagonal.  Accepts scalars or broadcastable
    arrays.
    """
    alpha_k = np.asarray(alpha_k, dtype=np.float64)
    alpha_l = np.asarray(alpha_l, dtype=np.float64)
    if np.any(alpha_k <= 0.0) or np.any(alpha_l <= 0.0):
        raise ValueError("eigenvalues must be positive")
    diff = alpha_k - alpha_l
    out = params.b * diff * diff + 8.0 * params.a * params.a * (alpha_k + alpha_l)
    return float(out) if out.ndim == 0 else out


def q_form(cfg: SpectralConfig, coords: np.ndarray) -> float:
    """Quadratic form ``sum_k lambda_k c_k^2`` of the noise operator.

    With ``coords`` equal to the ``f``-coordinates of ``z1`` this is
    ``<Q z1, z1>`` in ``Dom((-A)^(1/2))``; with the ``e``-coordinates of
    ``z2`` it is ``<Q z2, z2>`` in L2.
    """
    coords = np.asarray(coords, dtype=np.float64)
    if coords.shape != (cfg.n_modes,):
        raise ValueError("coordinate vector does not match n_modes")
    return float(np.dot(cfg.lambdas, coords * coords))


def _check_window(cfg: SpectralConfig, w: Window) -> None:
    if w.n_modes != cfg.n_modes:
        raise ValueError(f"window has {w.n_modes} modes, config has {cfg.n_modes}")


def q_infinity_quadratic_form(params: ModelParams, cfg: SpectralConfig, w: Window) -> float:
    """Quadratic form of the stationary covariance operator, diagonal case.

    Returns ``(1/(4ab)) sum lambda_k z1_k^2 + (1/(4a)) sum lambda_k z2_k^2``,
    the almost-sure limit of the time-averaged squared window observation.
    """
    _check_window(cfg, w)
    q1 = q_form(cfg, w.z1)
    q2 = q_form(cfg, w.z2)
    return q1 / (4.0 * params.a * params.b) + q2 / (4.0 * params.a)


def q_infinity_general_quadratic_form(
    params: ModelParams,
    cfg: SpectralConfig,
    q_matrix: np.ndarray,
    w: Window,
) -> float:
    """Quadratic form of the stationary covariance from its double-series form.

    Evaluates the truncated double series of the general (not necessarily
    diagonal) stationary covariance, with ``q_matrix[n, k] = <Q e_n, e_k>``.
    Serves as an oracle for :func:`q_infinity_quadratic_form`: with
    ``q_matrix = diag(lambdas)`` both agree to rounding error.
    """
    _check_window(cfg, w)
    q = np.asarray(q_matrix, dtype=np.float64)
    n = cfg.n_modes
    if q.shape != (n, n):
        raise ValueError(f"q_matrix must be {n}x{n}, got {q.shape}")
    if not np.allclose(q, q.T, rtol=0.0, atol=1e-12 * max(1.0, float(np.abs(q).max()))):
        raise ValueError("q_matrix must be symmetric")

    a, b = params.a, params.b
    alphas = cfg.alphas
    zeta = w.z1_l2_coords(cfg)  # L2 coordinates of the first component
    xi = w.z2

    # denom[n, k] = b^2 (alpha_n - alpha_k)^2 + 8 a^2 b (alpha_n + alpha_k)
    an = alphas[:, None]
    ak = alphas[None, :]
    denom = b * b * (an - ak) ** 2 + 8.0 * a * a * b * (an + ak)
    weight = q / denom

    # First block, e_k coordinates: sum_n w[n,k] (4 a alpha_n zeta_n + b (alpha_k - alpha_n) xi_n)
    out1 = weight.T @ (4.0 * a * alphas * zeta) + (weight * (ak - an)).T @ (b * xi)
    # Second block: sum_n w[n,k] (b alpha_n (alpha_n - alpha_k) zeta_n + 2ab (alpha_n + alpha_k) xi_n)
    out2 = (weight * (an - ak)).T @ (b * alphas * zeta) + (weight * (an + ak)).T @ (2.0 * a * b * xi)

    return float(np.dot(alphas * out1, zeta) + np.dot(out2, xi))


def stationary_mode_covariance(params: ModelParams, alpha_n: float, lambda_n: float) -> np.ndarray:
    """Stationary covariance ``diag(lambda/(4ab*alpha), lambda/(4a))`` of one mode.

    This is the unique solution of the 2x2 continuous Lyapunov equation
    ``M P + P M^T + diag(0, lambda) = 0`` for the mode drift ``M``.
    """
    if alpha_n <= 0.0 or lambda_n < 0.0:
        raise ValueError("alpha_n must be positive and lambda_n nonnegative")
    a, b = params.a, params.b
    return np.array(
        [
            [lambda_n / (4.0 * a * b * alpha_n), 0.0],
            [0.0, lambda_n / (4.0 * a)],
        ]
    )


def mode_drift_matrix(params: ModelParams, alpha_n: float) -> np.ndarray:
    """Drift matrix ``[[0, 1], [-b*alpha_n, -2a]]`` of a single mode pair."""
    return np.array([[0.0, 1.0], [-params.b * alpha_n, -2.0 * params.a]])
