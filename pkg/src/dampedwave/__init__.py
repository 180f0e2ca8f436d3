"""Simulation and minimum-contrast inference for the strongly damped
stochastic wave equation in spectral (diagonal) form.

The package simulates the truncated mode system, accumulates time-averaged
quadratic observation functionals, evaluates minimum-contrast estimators of
the damping and stiffness parameters, computes their theoretical limiting
variances, and runs Monte Carlo studies of consistency and asymptotic
normality.
"""

from .asymptotics import (
    LimitingVariance,
    closed_form_variance,
    limiting_variance,
    var_abar,
    var_bbar_z1_a,
    var_bbar_z1z2,
)
from .config import RunConfig, load_config, parse_config, preset
from .errors import (
    ConfigError,
    DampedWaveError,
    DegenerateObservationError,
    InsufficientSampleError,
    IntegrationDivergedError,
    InvalidWindowError,
    UnstableEstimateError,
)
from .estimators import (
    Estimate,
    EstimatorSpec,
    abar_general,
    abar_k,
    abar_z2,
    bbar_general,
    bbar_jk,
    bbar_z1_a,
    bbar_z1z2,
    estimator_time_series,
)
from .functionals import (
    ComponentAccumulators,
    CrossWindowAccumulator,
    FunctionalSnapshot,
    QuadraticAccumulator,
    SnapshotRecorder,
    inner_products,
    merge,
)
from .model import (
    InitialCondition,
    ModelParams,
    SpectralConfig,
    Window,
    d_denominator,
    dirichlet_eigenvalues,
    inverse_square_lambdas,
    mode_drift_matrix,
    q_form,
    q_infinity_general_quadratic_form,
    q_infinity_quadratic_form,
    stationary_mode_covariance,
)
from .simulate import (
    ExactTransition,
    ModeState,
    SimPlan,
    TrajectoryRecorder,
    euler_step,
    exact_transition,
    simulate,
)
from .stats import (
    EstimatorReport,
    McPlan,
    McReport,
    qq_points,
    replication_seed,
    run_monte_carlo,
    shapiro_wilk,
)

__version__ = "0.1.0"
