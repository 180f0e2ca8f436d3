"""Monte Carlo replication harness and normality diagnostics.

Replications are independent trajectories whose seeds derive injectively
from ``(seed_base, replication_index)``; aggregation is a deterministic fold
in index order, so reports do not depend on scheduling.  The harness
collects, per estimator: the sample mean, the sample variance of the
rescaled error ``sqrt(T) (theta_hat - theta)``, the theoretical limiting
variance, maximal and 75th-percentile relative errors, and a Shapiro-Wilk
normality test of the rescaled sample.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from joblib import Parallel, delayed
from scipy.stats import norm

from .asymptotics import limiting_variance
from .errors import DampedWaveError, InsufficientSampleError, IntegrationDivergedError
from .estimators import EstimatorSpec
from .functionals import ComponentAccumulators
from .simulate import SimPlan, simulate

__all__ = [
    "McPlan",
    "EstimatorReport",
    "McReport",
    "replication_seed",
    "run_monte_carlo",
    "shapiro_wilk",
    "qq_points",
]

# Polynomial corrections for the two largest weights, ascending powers of
# 1/sqrt(n) (Royston's approximation to the exact Shapiro-Wilk coefficients).
_C1 = (0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056)
_C2 = (0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633)


def _poly(coeffs: Sequence[float], x: float) -> float:
    return sum(c * x**i for i, c in enumerate(coeffs))


def shapiro_wilk(sample) -> tuple[float, float]:
    """Shapiro-Wilk W statistic and approximate p-value.

    Valid for sample sizes 3..5000.  Weights use the normal-scores
    approximation with polynomial corrections for the two extreme
    coefficients; the null distribution of W is mapped to a standard normal
    through the published small-sample (n <= 11) and log-sample
    transformations.
    """
    x = np.sort(np.asarray(sample, dtype=np.float64))
    n = x.shape[0]
    if n < 3:
        raise InsufficientSampleError("Shapiro-Wilk requires at least 3 observations")
    if n > 5000:
        raise ValueError("Shapiro-Wilk approximation is valid only up to n = 5000")
    if not np.all(np.isfinite(x)):
        raise ValueError("sample must be finite")
    if x[-1] - x[0] <= 0.0:
        raise ValueError("sample has zero range")

    m = norm.ppf((np.arange(1, n + 1) - 0.375) / (n + 0.25))
    ssq = float(m @ m)
    a = np.empty(n)
    if n == 3:
        a[0], a[1], a[2] = -math.sqrt(0.5), 0.0, math.sqrt(0.5)
    else:
        rsn = 1.0 / math.sqrt(n)
        c = m / math.sqrt(ssq)
        a_n = c[-1] + _poly(_C1, rsn)
        if n > 5:
            a_n1 = c[-2] + _poly(_C2, rsn)
            phi = (ssq - 2.0 * m[-1] ** 2 - 2.0 * m[-2] ** 2) / (
                1.0 - 2.0 * a_n**2 - 2.0 * a_n1**2
            )
            a[2:-2] = m[2:-2] / math.sqrt(phi)
            a[-1], a[-2] = a_n, a_n1
            a[0], a[1] = -a_n, -a_n1
        else:
            phi = (ssq - 2.0 * m[-1] ** 2) / (1.0 - 2.0 * a_n**2)
            a[1:-1] = m[1:-1] / math.sqrt(phi)
            a[-1] = a_n
            a[0] = -a_n

    xc = x - x.mean()
    w = float((a @ x) ** 2 / (xc @ xc))
    w = min(w, 1.0)

    if n == 3:
        # exact null distribution: p = (6/pi) (asin(sqrt(W)) - asin(sqrt(3/4)))
        p = (6.0 / math.pi) * (math.asin(math.sqrt(w)) - math.pi / 3.0)
        return w, float(min(max(p, 0.0), 1.0))
    one_minus_w = max(1.0 - w, 1e-300)
    if n <= 11:
        gamma = -2.273 + 0.459 * n
        stat = -math.log(gamma - math.log(one_minus_w))
        mu = 0.5440 - 0.39978 * n + 0.025054 * n**2 - 0.0006714 * n**3
        sigma = math.exp(1.3822 - 0.77857 * n + 0.062767 * n**2 - 0.0020322 * n**3)
    else:
        ln_n = math.log(n)
        stat = math.log(one_minus_w)
        mu = -1.5861 - 0.31082 * ln_n - 0.083751 * ln_n**2 + 0.0038915 * ln_n**3
        sigma = math.exp(-0.4803 - 0.082676 * ln_n + 0.0030302 * ln_n**2)
    z = (stat - mu) / sigma
    return w, float(norm.sf(z))


def qq_points(sample) -> np.ndarray:
    """Normal Q-Q pairs ``(theoretical_quantile, order_statistic)``.

    Plotting positions are ``(i - 3/8) / (n + 1/4)``, matching the normal
    scores used by the Shapiro-Wilk weights.
    """
    x = np.sort(np.asarray(sample, dtype=np.float64))
    n = x.shape[0]
    if n == 0:
        raise InsufficientSampleError("Q-Q points need a nonempty sample")
    theo = norm.ppf((np.arange(1, n + 1) - 0.375) / (n + 0.25))
    return np.column_stack([theo, x])


@dataclass(frozen=True)
class McPlan:
    """Replicated simulation study; ``base.seed`` is ignored in favour of
    seeds derived from ``(seed_base, replication)``."""

    base: SimPlan
    replications: int
    estimators: tuple
    seed_base: int
    quadrature: str = "left_riemann"

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not (0 <= int(self.seed_base) < 2**64):
            raise ValueError("seed_base must fit in an unsigned 64-bit integer")
        object.__setattr__(self, "estimators", tuple(self.estimators))
        for spec in self.estimators:
            if not isinstance(spec, EstimatorSpec):
                raise TypeError("estimators must be EstimatorSpec instances")


def replication_seed(seed_base: int, replication: int) -> int:
    """Injective 64-bit seed for one replication."""
    ss = np.random.SeedSequence([int(seed_base), int(replication)])
    return int(ss.generate_state(1, np.uint64)[0])


def _run_replication(plan: McPlan, replication: int) -> list:
    sim = dataclasses.replace(plan.base, seed=replication_seed(plan.seed_base, replication))
    cfg = sim.cfg
    accs = [
        ComponentAccumulators(spec.window(cfg), cfg, plan.quadrature) for spec in plan.estimators
    ]
    try:
        simulate(sim, accs)
        return [
            spec.evaluate(cfg, sim.params, acc.j1, acc.j2, acc.cross)
            for spec, acc in zip(plan.estimators, accs)
        ]
    except IntegrationDivergedError as exc:
        raise IntegrationDivergedError(
            f"replication {replication}: {exc}", step=exc.step, replication=replication
        ) from exc
    except DampedWaveError as exc:
        raise type(exc)(f"replication {replication}: {exc}") from exc


@dataclass(frozen=True)
class EstimatorReport:
    """Aggregated Monte Carlo statistics for one estimator."""

    label: str
    kind: str
    mean: float
    variance_scaled: Optional[float]
    variance_theoretical: Optional[float]
    rel_err_max: float
    rel_err_p75: float
    sw_w: Optional[float]
    sw_p: Optional[float]
    sample: np.ndarray

    def scaled_sample(self, true_value: float, t_horizon: float) -> np.ndarray:
        return math.sqrt(t_horizon) * (self.sample - true_value)


@dataclass(frozen=True)
class McReport:
    """Full study output: per-estimator reports plus the study context."""

    t_horizon: float
    replications: int
    true_a: float
    true_b: float
    reports: tuple


def run_monte_carlo(plan: McPlan, n_jobs: int = 1) -> McReport:
    """Run all replications and aggregate estimator statistics.

    ``n_jobs`` follows joblib conventions (-1 uses all cores); results are
    identical for any job count because aggregation is keyed by replication
    index.
    """
    if n_jobs == 1:
        rows = [_run_replication(plan, r) for r in range(plan.replications)]
    else:
        rows = Parallel(n_jobs=n_jobs)(
            delayed(_run_replication)(plan, r) for r in range(plan.replications)
        )
    estimates = np.asarray(rows, dtype=np.float64)

    params = plan.base.params
    t_horizon = plan.base.t_horizon
    sqrt_t = math.sqrt(t_horizon)
    reports = []
    for idx, spec in enumerate(plan.estimators):
        sample = estimates[:, idx].copy()
        true_value = params.a if spec.estimates_parameter == "a" else params.b
        scaled = sqrt_t * (sample - true_value)
        rel = np.abs(sample - true_value) / true_value
        variance = float(np.var(scaled, ddof=1)) if plan.replications >= 2 else None
        if plan.replications >= 3:
            sw_w, sw_p = shapiro_wilk(scaled)
        else:
            sw_w = sw_p = None
        theo = limiting_variance(spec, params, plan.base.cfg)
        reports.append(
            EstimatorReport(
                label=spec.label,
                kind=spec.kind,
                mean=float(sample.mean()),
                variance_scaled=variance,
                variance_theoretical=None if theo is None else theo.value,
                rel_err_max=float(rel.max()),
                rel_err_p75=float(np.quantile(rel, 0.75)),
                sw_w=sw_w,
                sw_p=sw_p,
                sample=sample,
            )
        )
    return McReport(
        t_horizon=t_horizon,
        replications=plan.replications,
        true_a=params.a,
        true_b=params.b,
        reports=tuple(reports),
    )
