"""Run configuration: YAML parsing, validation, and the bundled preset.

A run is described by one key-value document so that full experimental
setups are versionable; command-line flags only choose the subcommand and
override paths/seed.  Recognised keys:

``a``, ``b``, ``n_modes``, ``alphas`` or ``alpha_rule`` (``dirichlet_1d``),
``lambdas`` or ``lambda_rule`` (``paper``), ``t_horizon``, ``dt``,
``scheme``, ``quadrature``, ``seed``, ``stride``, ``replications``,
``estimators``, ``out_dir``, ``u0``, ``v0``.

Estimator entries are mappings with a ``kind`` plus either mode indices
``j``/``k`` or explicit coordinate vectors ``z1``/``z2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import yaml

from .errors import ConfigError
from .estimators import ESTIMATOR_KINDS, EstimatorSpec
from .model import (
    InitialCondition,
    ModelParams,
    SpectralConfig,
    dirichlet_eigenvalues,
    inverse_square_lambdas,
)
from .simulate import SCHEMES, SimPlan
from .functionals import QUADRATURES
from .stats import McPlan

__all__ = ["RunConfig", "parse_config", "load_config", "preset", "PRESET_NAMES"]

_TOP_KEYS = {
    "a",
    "b",
    "n_modes",
    "alphas",
    "alpha_rule",
    "lambdas",
    "lambda_rule",
    "t_horizon",
    "dt",
    "scheme",
    "quadrature",
    "seed",
    "stride",
    "replications",
    "estimators",
    "out_dir",
    "u0",
    "v0",
}

_ESTIMATOR_KEYS = {"kind", "j", "k", "z1", "z2"}

ALPHA_RULES = ("dirichlet_1d",)
LAMBDA_RULES = ("paper",)

PRESET_NAMES = ("paper",)


@dataclass(frozen=True)
class RunConfig:
    """Validated run description with spectral data fully resolved."""

    a: float
    b: float
    n_modes: int
    alphas: tuple
    lambdas: tuple
    t_horizon: float
    dt: float
    scheme: str
    quadrature: str
    seed: int
    stride: int
    replications: int
    estimators: tuple
    out_dir: str
    u0: tuple
    v0: tuple

    @property
    def params(self) -> ModelParams:
        return ModelParams(a=self.a, b=self.b)

    @property
    def spectral(self) -> SpectralConfig:
        return SpectralConfig(
            n_modes=self.n_modes, alphas=np.array(self.alphas), lambdas=np.array(self.lambdas)
        )

    @property
    def initial_condition(self) -> InitialCondition:
        return InitialCondition(np.array(self.u0), np.array(self.v0))

    def sim_plan(self, seed: Optional[int] = None) -> SimPlan:
        return SimPlan(
            params=self.params,
            cfg=self.spectral,
            x0=self.initial_condition,
            t_horizon=self.t_horizon,
            dt=self.dt,
            scheme=self.scheme,
            seed=self.seed if seed is None else seed,
        )

    def mc_plan(self) -> McPlan:
        return McPlan(
            base=self.sim_plan(),
            replications=self.replications,
            estimators=self.estimators,
            seed_base=self.seed,
            quadrature=self.quadrature,
        )


def _require(data: dict, key: str):
    if key not in data:
        raise ConfigError(f"missing required key: {key}")
    return data[key]


def _positive_number(data: dict, key: str) -> float:
    value = _require(data, key)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {type(value).__name__}")
    value = float(value)
    if not value > 0.0 or not np.isfinite(value):
        raise ConfigError(f"{key}: must be finite and positive, got {value}")
    return value


def _positive_int(data: dict, key: str, default: Optional[int] = None) -> int:
    if key not in data and default is not None:
        return default
    value = _require(data, key)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key}: expected an integer, got {type(value).__name__}")
    if value < 1:
        raise ConfigError(f"{key}: must be >= 1, got {value}")
    return value


def _vector(data: dict, key: str, n_modes: int, default: float) -> tuple:
    value = data.get(key, default)
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return (float(value),) * n_modes
    if isinstance(value, list) and all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in value
    ):
        if len(value) != n_modes:
            raise ConfigError(f"{key}: expected {n_modes} entries, got {len(value)}")
        return tuple(float(x) for x in value)
    raise ConfigError(f"{key}: expected a number or a list of numbers")


def _spectrum(data: dict, n_modes: int, key: str, rule_key: str, rules: tuple, builder) -> tuple:
    if key in data and rule_key in data:
        raise ConfigError(f"{key} and {rule_key} are mutually exclusive")
    if rule_key in data:
        rule = data[rule_key]
        if rule not in rules:
            raise ConfigError(f"{rule_key}: unknown rule {rule!r}, expected one of {rules}")
        return tuple(float(x) for x in builder(n_modes))
    if key in data:
        values = data[key]
        if not isinstance(values, list) or len(values) != n_modes:
            raise ConfigError(f"{key}: expected a list of {n_modes} numbers")
        return tuple(float(x) for x in values)
    raise ConfigError(f"missing required key: {key} (or {rule_key})")


def _estimator_spec(entry, index: int, n_modes: int) -> EstimatorSpec:
    where = f"estimators[{index}]"
    if not isinstance(entry, dict):
        raise ConfigError(f"{where}: expected a mapping")
    unknown = set(entry) - _ESTIMATOR_KEYS
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    kind = entry.get("kind")
    if kind not in ESTIMATOR_KINDS:
        raise ConfigError(f"{where}.kind: expected one of {ESTIMATOR_KINDS}, got {kind!r}")
    for ikey in ("j", "k"):
        if ikey in entry:
            value = entry[ikey]
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{where}.{ikey}: expected an integer")
            if not 1 <= value <= n_modes:
                raise ConfigError(f"{where}.{ikey}: mode index {value} out of range 1..{n_modes}")
    for vkey in ("z1", "z2"):
        if vkey in entry:
            value = entry[vkey]
            if not isinstance(value, list) or len(value) != n_modes:
                raise ConfigError(f"{where}.{vkey}: expected a list of {n_modes} numbers")
    try:
        return EstimatorSpec(
            kind=kind,
            j=entry.get("j"),
            k=entry.get("k"),
            z1=tuple(entry["z1"]) if "z1" in entry else None,
            z2=tuple(entry["z2"]) if "z2" in entry else None,
        )
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def from_mapping(data: dict) -> RunConfig:
    """Validate a parsed mapping into a :class:`RunConfig`."""
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a key-value mapping")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown keys: {sorted(unknown)}")

    a = _positive_number(data, "a")
    b = _positive_number(data, "b")
    n_modes = _positive_int(data, "n_modes")
    alphas = _spectrum(data, n_modes, "alphas", "alpha_rule", ALPHA_RULES, dirichlet_eigenvalues)
    lambdas = _spectrum(data, n_modes, "lambdas", "lambda_rule", LAMBDA_RULES, inverse_square_lambdas)
    t_horizon = _positive_number(data, "t_horizon")
    dt = _positive_number(data, "dt")
    if dt >= t_horizon:
        raise ConfigError(f"dt: must be smaller than t_horizon ({dt} >= {t_horizon})")

    scheme = data.get("scheme", "euler")
    if scheme not in SCHEMES:
        raise ConfigError(f"scheme: expected one of {SCHEMES}, got {scheme!r}")
    quadrature = data.get("quadrature", "left_riemann")
    if quadrature not in QUADRATURES:
        raise ConfigError(f"quadrature: expected one of {QUADRATURES}, got {quadrature!r}")

    seed = _require(data, "seed")
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ConfigError(f"seed: expected an unsigned 64-bit integer, got {seed!r}")
    stride = _positive_int(data, "stride", default=10000)
    replications = _positive_int(data, "replications", default=100)

    entries = data.get("estimators", [])
    if not isinstance(entries, list):
        raise ConfigError("estimators: expected a list")
    estimators = tuple(_estimator_spec(e, i, n_modes) for i, e in enumerate(entries))

    out_dir = data.get("out_dir", "out")
    if not isinstance(out_dir, str) or not out_dir:
        raise ConfigError("out_dir: expected a nonempty string")

    u0 = _vector(data, "u0", n_modes, default=0.0)
    v0 = _vector(data, "v0", n_modes, default=0.0)

    try:
        config = RunConfig(
            a=a,
            b=b,
            n_modes=n_modes,
            alphas=alphas,
            lambdas=lambdas,
            t_horizon=t_horizon,
            dt=dt,
            scheme=scheme,
            quadrature=quadrature,
            seed=seed,
            stride=stride,
            replications=replications,
            estimators=estimators,
            out_dir=out_dir,
            u0=u0,
            v0=v0,
        )
        config.spectral  # triggers spectrum validation
        config.sim_plan()
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    return config


def parse_config(text: str) -> RunConfig:
    """Parse a YAML document into a validated :class:`RunConfig`."""
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}") from exc
    return from_mapping(data)


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def preset(name: str) -> RunConfig:
    """Bundled reference configurations; ``paper`` is the reference setup
    (N = 10, T = 1000, dt = 1e-4, a = 1, b = 0.2, Dirichlet spectrum,
    inverse-square noise, unit initial coordinates, six coordinate
    estimators)."""
    if name not in PRESET_NAMES:
        raise ConfigError(f"unknown preset {name!r}, expected one of {PRESET_NAMES}")
    return from_mapping(
        {
            "a": 1.0,
            "b": 0.2,
            "n_modes": 10,
            "alpha_rule": "dirichlet_1d",
            "lambda_rule": "paper",
            "t_horizon": 1000.0,
            "dt": 1.0e-4,
            "scheme": "euler",
            "quadrature": "left_riemann",
            "seed": 20101,
            "stride": 10000,
            "replications": 100,
            "out_dir": "out",
            "u0": 1.0,
            "v0": 1.0,
            "estimators": [
                {"kind": "abar_k", "k": 1},
                {"kind": "abar_k", "k": 10},
                {"kind": "bbar_jk", "j": 1, "k": 1},
                {"kind": "bbar_jk", "j": 10, "k": 10},
                {"kind": "bbar_z1_a", "j": 1},
                {"kind": "bbar_z1_a", "j": 10},
            ],
        }
    )
