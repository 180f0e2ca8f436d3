"""Theoretical limiting variances of the rescaled estimation errors.

Each estimator satisfies a central limit theorem: ``sqrt(T) (theta_hat - theta)``
converges to a centred Gaussian whose variance is a double series over mode
pairs with the recurring denominator

    D[k, n] = b (alpha_k - alpha_n)^2 + 8 a^2 (alpha_k + alpha_n).

Windows are confined to the configured truncation, which makes the truncated
series exact rather than approximate.  For coordinate windows everything
collapses to closed forms:

    damping from any velocity coordinate:            a
    stiffness from (f_j, e_k), j != k:               4ab/alpha_j + 2 b^2/a
    stiffness from (f_j, e_j):                       4ab/alpha_j
    stiffness from f_j with damping known:           4ab/alpha_j + b^2/a

Summation is fixed row-major with exact accumulation so reported values are
reproducible across platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidWindowError
from .model import ModelParams, SpectralConfig, d_denominator, q_form

__all__ = [
    "LimitingVariance",
    "var_abar",
    "var_bbar_z1z2",
    "var_bbar_z1_a",
    "closed_form_variance",
    "limiting_variance",
    "CLOSED_FORM_KINDS",
]

CLOSED_FORM_KINDS = ("abar_k", "bbar_jk", "bbar_jj", "bbar_fj_a")


@dataclass(frozen=True)
class LimitingVariance:
    """Limiting variance value together with its provenance."""

    value: float
    estimator_kind: str
    truncation_n: int


def _sum_rowmajor(terms: np.ndarray) -> float:
    """Deterministic exactly rounded sum of a term matrix in row-major order."""
    return math.fsum(terms.ravel(order="C").tolist())


def _coords(cfg: SpectralConfig, coords, name: str) -> np.ndarray:
    arr = np.asarray(coords, dtype=np.float64)
    if arr.shape != (cfg.n_modes,):
        raise ValueError(f"{name} does not match n_modes")
    if not np.any(arr != 0.0):
        raise InvalidWindowError(f"{name} must be nonzero")
    return arr


def _d_matrix(params: ModelParams, cfg: SpectralConfig) -> np.ndarray:
    return d_denominator(params, cfg.alphas[:, None], cfg.alphas[None, :])


def var_abar(params: ModelParams, cfg: SpectralConfig, z2_coords) -> float:
    """Limiting variance of the damping estimator on window ``(0, z2)``.

    ``(8 a^3 / Q2^2) * sum_{k,n} lambda_k lambda_n (alpha_k + alpha_n)
    z2_k^2 z2_n^2 / D[k, n]``.
    """
    z2 = _coords(cfg, z2_coords, "z2")
    a = params.a
    q2 = q_form(cfg, z2)
    lam_sq = cfg.lambdas * z2 * z2
    alpha_sum = cfg.alphas[:, None] + cfg.alphas[None, :]
    terms = np.outer(lam_sq, lam_sq) * alpha_sum / _d_matrix(params, cfg)
    return 8.0 * a**3 / (q2 * q2) * _sum_rowmajor(terms)


def var_bbar_z1z2(params: ModelParams, cfg: SpectralConfig, z1_coords, z2_coords) -> float:
    """Limiting variance of the two-component stiffness estimator.

    Sum of a pure-``z1`` series weighted ``64 a^3 b / Q1^2`` and a coupled
    series weighted ``8 a b^2 / (Q1^2 Q2^2)`` whose summand squares the two
    bracket combinations of ``Q1 z2_k z2_n`` and ``Q2 z1_k z1_n`` against
    ``sqrt(alpha)`` factors.
    """
    z1 = _coords(cfg, z1_coords, "z1")
    z2 = _coords(cfg, z2_coords, "z2")
    a, b = params.a, params.b
    q1 = q_form(cfg, z1)
    q2 = q_form(cfg, z2)
    dmat = _d_matrix(params, cfg)
    lam = cfg.lambdas
    sqrt_a_col = np.sqrt(cfg.alphas)[:, None]
    sqrt_a_row = np.sqrt(cfg.alphas)[None, :]

    z1_outer = np.outer(z1, z1)
    z2_outer = np.outer(z2, z2)
    lam_outer = np.outer(lam, lam)

    first = 64.0 * a**3 * b / (q1 * q1) * _sum_rowmajor(lam_outer * z1_outer * z1_outer / dmat)

    bracket = (q1 * z2_outer * sqrt_a_col - q2 * z1_outer * sqrt_a_row) ** 2
    bracket += (q1 * z2_outer * sqrt_a_row - q2 * z1_outer * sqrt_a_col) ** 2
    second = 8.0 * a * b * b / (q1 * q1 * q2 * q2) * _sum_rowmajor(lam_outer * bracket / dmat)
    return first + second


def var_bbar_z1_a(params: ModelParams, cfg: SpectralConfig, z1_coords) -> float:
    """Limiting variance of the stiffness estimator with damping known.

    ``(64 a^3 b / Q1^2) * sum lam_k lam_n z1_k^2 z1_n^2 / D +
    (8 a b^2 / Q1^2) * sum lam_k lam_n (alpha_k + alpha_n) z1_k^2 z1_n^2 / D``.
    """
    z1 = _coords(cfg, z1_coords, "z1")
    a, b = params.a, params.b
    q1 = q_form(cfg, z1)
    dmat = _d_matrix(params, cfg)
    lam_sq = cfg.lambdas * z1 * z1
    base = np.outer(lam_sq, lam_sq) / dmat
    alpha_sum = cfg.alphas[:, None] + cfg.alphas[None, :]
    first = 64.0 * a**3 * b / (q1 * q1) * _sum_rowmajor(base)
    second = 8.0 * a * b * b / (q1 * q1) * _sum_rowmajor(base * alpha_sum)
    return first + second


def closed_form_variance(kind: str, params: ModelParams, alpha_j: float = 0.0) -> float:
    """Closed-form limiting variances for coordinate windows.

    ``abar_k`` needs no eigenvalue (the variance is ``a`` for every
    coordinate); the stiffness kinds need ``alpha_j`` of the observed
    position coordinate.
    """
    a, b = params.a, params.b
    if kind == "abar_k":
        return a
    if alpha_j <= 0.0:
        raise ValueError("alpha_j must be positive for stiffness variances")
    if kind == "bbar_jk":
        return 4.0 * a * b / alpha_j + 2.0 * b * b / a
    if kind == "bbar_jj":
        return 4.0 * a * b / alpha_j
    if kind == "bbar_fj_a":
        return 4.0 * a * b / alpha_j + b * b / a
    raise ValueError(f"unknown closed-form kind {kind!r}; expected one of {CLOSED_FORM_KINDS}")


def limiting_variance(spec, params: ModelParams, cfg: SpectralConfig):
    """Limiting variance for an estimator spec, or None when no CLT applies.

    The general damping estimator reduces to the velocity-window case when
    its first component vanishes; likewise the general stiffness estimator
    with a vanishing second component reduces to the known-damping case.  No
    limit theorem is evaluated for genuinely mixed general windows.
    """
    kind = spec.kind
    w = spec.window(cfg)
    if kind in ("abar_k", "abar_z2") or (kind == "abar_general" and not w.z1_nonzero):
        value = var_abar(params, cfg, w.z2)
    elif kind in ("bbar_jk", "bbar_z1z2"):
        value = var_bbar_z1z2(params, cfg, w.z1, w.z2)
    elif kind == "bbar_z1_a" or (kind == "bbar_general" and not w.z2_nonzero):
        value = var_bbar_z1_a(params, cfg, w.z1)
    else:
        return None
    return LimitingVariance(value=value, estimator_kind=kind, truncation_n=cfg.n_modes)
