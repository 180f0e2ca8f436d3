"""Trajectory integration of the truncated mode system.

For each mode ``n`` the pair ``(u_n, v_n)`` solves

    du_n = v_n dt
    dv_n = (-b alpha_n u_n - 2 a v_n) dt + sqrt(lambda_n) dbeta_n

with independent scalar Brownian motions ``beta_n``.  Two schemes are
available: plain Euler-Maruyama and the exact Gaussian transition of the
linear mode SDE (used as an oracle for the Euler scheme).  Both consume the
same per-mode stream of standard normal pairs, so trajectories under the two
schemes are driven by shared noise and directly comparable.

States stream to observers in blocks; nothing is stored unless an observer
stores it, so arbitrarily long horizons run in O(N) memory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ._kernel import advance
from .errors import IntegrationDivergedError
from .model import (
    InitialCondition,
    ModelParams,
    SpectralConfig,
    mode_drift_matrix,
    stationary_mode_covariance,
)

__all__ = [
    "ModeState",
    "SimPlan",
    "ExactTransition",
    "SCHEMES",
    "euler_step",
    "exact_transition",
    "simulate",
    "mode_rngs",
    "TrajectoryRecorder",
]

SCHEMES = ("euler", "exact")

DEFAULT_CHUNK_STEPS = 65536


@dataclass(frozen=True)
class ModeState:
    """Spectral coordinates of the solution at model time ``t``."""

    u: np.ndarray
    v: np.ndarray
    t: float

    def __post_init__(self):
        u = np.asarray(self.u, dtype=np.float64)
        v = np.asarray(self.v, dtype=np.float64)
        if u.ndim != 1 or u.shape != v.shape:
            raise ValueError("u and v must be 1-d vectors of equal length")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @property
    def n_modes(self) -> int:
        return self.u.shape[0]


@dataclass(frozen=True)
class SimPlan:
    """Everything needed to reproduce one trajectory bit for bit."""

    params: ModelParams
    cfg: SpectralConfig
    x0: InitialCondition
    t_horizon: float
    dt: float
    scheme: str = "euler"
    seed: int = 0

    def __post_init__(self):
        if not (self.dt > 0.0 and math.isfinite(self.dt)):
            raise ValueError("dt must be finite and positive")
        if not (self.t_horizon > self.dt):
            raise ValueError("t_horizon must exceed dt")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if self.x0.u0.shape[0] != self.cfg.n_modes:
            raise ValueError("initial condition does not match n_modes")
        if self.n_steps < 1:
            raise ValueError("horizon shorter than one step")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_horizon / self.dt))


@dataclass(frozen=True)
class ExactTransition:
    """One-step Gaussian transition of a single mode.

    ``mean_matrix`` is ``exp(M*dt)``; ``noise_cov`` the covariance of the
    stochastic increment over one step.  ``noise_chol`` is the lower
    triangular factor of ``noise_cov`` in velocity-major order
    ``(v, u)``: row 0 maps the first standard normal draw to the velocity
    noise, which keeps the dominant noise direction on the same draw the
    Euler scheme uses.
    """

    mean_matrix: np.ndarray
    noise_cov: np.ndarray
    noise_chol: np.ndarray


def _expm_mode(params: ModelParams, alpha_n: float, t: float) -> np.ndarray:
    """Closed-form ``exp(M t)`` for the mode drift ``M``.

    The shifted matrix ``B = M + a I`` satisfies ``B^2 = (a^2 - b alpha) I``,
    so the exponential splits into scalar functions of the discriminant:
    hyperbolic for two real eigenvalues, trigonometric for the oscillatory
    (complex) regime, polynomial at the double root.  The real branch is
    written with ``exp((mu +- nu) t)`` directly to stay finite for large
    ``t``.
    """
    a, b = params.a, params.b
    disc = a * a - b * alpha_n
    scale = max(a * a, b * alpha_n)
    mm = mode_drift_matrix(params, alpha_n)
    shifted = mm + a * np.eye(2)
    if disc > 1e-12 * scale:
        nu = math.sqrt(disc)
        ep = math.exp((nu - a) * t)
        em = math.exp((-nu - a) * t)
        c = 0.5 * (ep + em)
        s = 0.5 * (ep - em) / nu
    elif disc < -1e-12 * scale:
        omega = math.sqrt(-disc)
        decay = math.exp(-a * t)
        c = decay * math.cos(omega * t)
        s = decay * math.sin(omega * t) / omega
    else:
        decay = math.exp(-a * t)
        c = decay
        s = decay * t
    return c * np.eye(2) + s * shifted


def exact_transition(params: ModelParams, alpha_n: float, lambda_n: float, dt: float) -> ExactTransition:
    """Exact one-step transition of a mode pair over a step of length ``dt``.

    The noise covariance uses the stationarity identity
    ``Q_dt = P_inf - exp(M dt) P_inf exp(M dt)^T`` with ``P_inf`` the
    stationary covariance, which is closed form and positive semidefinite up
    to rounding.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    phi = _expm_mode(params, alpha_n, dt)
    p_inf = stationary_mode_covariance(params, alpha_n, lambda_n)
    cov = p_inf - phi @ p_inf @ phi.T
    cov = 0.5 * (cov + cov.T)

    cvv = max(cov[1, 1], 0.0)
    s_v = math.sqrt(cvv)
    r = cov[0, 1] / s_v if s_v > 0.0 else 0.0
    s_u = math.sqrt(max(cov[0, 0] - r * r, 0.0))
    chol = np.array([[s_v, 0.0], [r, s_u]])
    return ExactTransition(mean_matrix=phi, noise_cov=cov, noise_chol=chol)


def euler_step(
    state: ModeState,
    params: ModelParams,
    cfg: SpectralConfig,
    dt: float,
    gaussians: np.ndarray,
) -> ModeState:
    """One Euler-Maruyama step of the full mode system.

    ``gaussians`` holds one standard normal draw per mode.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    g = np.asarray(gaussians, dtype=np.float64)
    if g.shape != (cfg.n_modes,) or state.n_modes != cfg.n_modes:
        raise ValueError("state, config, and gaussians must agree on n_modes")
    if not (np.all(np.isfinite(state.u)) and np.all(np.isfinite(state.v))):
        raise IntegrationDivergedError("state is non-finite before the step")
    u = state.u + state.v * dt
    v = (
        state.v
        + (-params.b * cfg.alphas * state.u - 2.0 * params.a * state.v) * dt
        + np.sqrt(cfg.lambdas * dt) * g
    )
    return ModeState(u=u, v=v, t=state.t + dt)


def _scheme_matrices(plan: SimPlan) -> tuple[np.ndarray, np.ndarray]:
    """Per-mode update matrix and noise map for the selected scheme."""
    n = plan.cfg.n_modes
    phi = np.empty((n, 2, 2))
    lmat = np.zeros((n, 2, 2))
    if plan.scheme == "euler":
        for i in range(n):
            phi[i] = np.eye(2) + plan.dt * mode_drift_matrix(plan.params, plan.cfg.alphas[i])
            lmat[i, 1, 0] = math.sqrt(plan.cfg.lambdas[i] * plan.dt)
    else:
        for i in range(n):
            tr = exact_transition(plan.params, plan.cfg.alphas[i], plan.cfg.lambdas[i], plan.dt)
            phi[i] = tr.mean_matrix
            # noise_chol rows are (v, u); the kernel wants rows (u, v)
            lmat[i, 0, 0] = tr.noise_chol[1, 0]
            lmat[i, 0, 1] = tr.noise_chol[1, 1]
            lmat[i, 1, 0] = tr.noise_chol[0, 0]
    return phi, lmat


def mode_rngs(seed: int, n_modes: int) -> list:
    """Independent per-mode generators derived from ``(seed, mode_index)``.

    Keyed by mode index so enlarging the truncation does not perturb the
    noise of existing modes.
    """
    return [np.random.default_rng(np.random.SeedSequence([int(seed), n])) for n in range(n_modes)]


def simulate(
    plan: SimPlan,
    observers: Sequence = (),
    chunk_steps: int = DEFAULT_CHUNK_STEPS,
) -> ModeState:
    """Integrate from the initial state to the horizon, streaming to observers.

    Each observer receives ``observe_block(step0, dt, u, v)`` calls where
    ``u`` and ``v`` have shape ``(m + 1, N)``; row ``i`` is the state at step
    ``step0 + i`` (row 0 repeats the state already seen at the end of the
    previous block, or the initial condition on the first call).  Results are
    bit-reproducible for a fixed plan and independent of ``chunk_steps``.
    """
    if chunk_steps < 1:
        raise ValueError("chunk_steps must be >= 1")
    cfg = plan.cfg
    n = cfg.n_modes
    if not (np.all(np.isfinite(plan.x0.u0)) and np.all(np.isfinite(plan.x0.v0))):
        raise IntegrationDivergedError("initial condition is non-finite")

    phi, lmat = _scheme_matrices(plan)
    rngs = mode_rngs(plan.seed, n)

    u = plan.x0.u0.copy()
    v = plan.x0.v0.copy()
    total = plan.n_steps
    step0 = 0
    while step0 < total:
        m = min(chunk_steps, total - step0)
        gauss = np.empty((n, m, 2))
        for i, rng in enumerate(rngs):
            gauss[i] = rng.standard_normal((m, 2))
        block_u = np.empty((m + 1, n))
        block_v = np.empty((m + 1, n))
        block_u[0] = u
        block_v[0] = v
        advance(u, v, phi, lmat, gauss, block_u[1:], block_v[1:])
        if not (np.all(np.isfinite(block_u)) and np.all(np.isfinite(block_v))):
            bad = np.flatnonzero(~np.isfinite(block_u).all(axis=1) | ~np.isfinite(block_v).all(axis=1))
            step = step0 + int(bad[0])
            raise IntegrationDivergedError(
                f"non-finite state at step {step} (t ~ {step * plan.dt:.6g}); "
                f"reduce dt (stability needs b*alpha_N*dt well below 2a)",
                step=step,
            )
        for obs in observers:
            obs.observe_block(step0, plan.dt, block_u, block_v)
        step0 += m

    return ModeState(u=u, v=v, t=total * plan.dt)


class TrajectoryRecorder:
    """Observer keeping every ``stride``-th state (plus the initial one)."""

    def __init__(self, stride: int = 1):
        if stride < 1:
            raise ValueError("stride must be >= 1")
        self.stride = int(stride)
        self.times: list = []
        self.states_u: list = []
        self.states_v: list = []

    def observe_block(self, step0: int, dt: float, u: np.ndarray, v: np.ndarray) -> None:
        first = step0 if step0 == 0 else step0 + 1
        last = step0 + u.shape[0] - 1
        hit = -(-first // self.stride) * self.stride  # first multiple of stride >= first
        for step in range(hit, last + 1, self.stride):
            i = step - step0
            self.times.append(step * dt)
            self.states_u.append(u[i].copy())
            self.states_v.append(v[i].copy())

    def rows(self) -> Iterable[tuple]:
        for t, uu, vv in zip(self.times, self.states_u, self.states_v):
            yield t, uu, vv
