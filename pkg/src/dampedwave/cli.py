"""Command-line front end.

Subcommands: ``simulate`` (trajectory CSV), ``estimate`` (estimator time
series CSVs from one trajectory), ``variance`` (theoretical limiting
variances), ``montecarlo`` (replicated study with report and Q-Q CSVs), and
``qq`` (regenerate Q-Q CSVs from persisted samples without resimulating).

All numeric output uses 17-significant-digit decimal formatting, so parsing
an emitted CSV recovers the exact float values and repeated runs with the
same configuration are byte-identical.

Exit codes: 0 success, 2 configuration error, 3 integration diverged,
4 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from pathlib import Path

import numpy as np

from .asymptotics import limiting_variance
from .config import PRESET_NAMES, RunConfig, load_config, preset
from .errors import ConfigError, DampedWaveError, IntegrationDivergedError
from .estimators import Estimate, estimator_time_series
from .functionals import ComponentAccumulators, SnapshotRecorder
from .simulate import TrajectoryRecorder, simulate
from .stats import qq_points, run_monte_carlo

__all__ = ["main"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGED = 3
EXIT_IO = 4


def _fmt(value) -> str:
    if value is None:
        return ""
    return f"{float(value):.17g}"


def _write_csv(path: Path, header: str, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _resolve_config(args) -> RunConfig:
    if args.preset is not None and args.config is not None:
        raise ConfigError("give either a config file or --preset, not both")
    if args.preset is not None:
        config = preset(args.preset)
    elif args.config is not None:
        config = load_config(args.config)
    else:
        raise ConfigError("a config file or --preset is required")
    overrides = {}
    if args.out_dir is not None:
        overrides["out_dir"] = args.out_dir
    if args.seed is not None:
        overrides["seed"] = args.seed
    if overrides:
        config = dataclasses.replace(config, **overrides)
        try:
            config.sim_plan()  # revalidate after overrides
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from exc
    return config


def _out_dir(config: RunConfig) -> Path:
    path = Path(config.out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_simulate(config: RunConfig) -> int:
    out = _out_dir(config)
    recorder = TrajectoryRecorder(stride=config.stride)
    final = simulate(config.sim_plan(), [recorder])
    n = config.n_modes
    header = "t," + ",".join(f"u_{i}" for i in range(1, n + 1)) + "," + ",".join(
        f"v_{i}" for i in range(1, n + 1)
    )
    rows = (
        [_fmt(t)] + [_fmt(x) for x in uu] + [_fmt(x) for x in vv]
        for t, uu, vv in recorder.rows()
    )
    path = out / "trajectory.csv"
    _write_csv(path, header, rows)
    print(f"wrote {path} ({len(recorder.times)} rows, final t = {final.t:g})")
    return EXIT_OK


def cmd_estimate(config: RunConfig) -> int:
    out = _out_dir(config)
    cfg = config.spectral
    params = config.params
    recorders = [
        SnapshotRecorder(
            ComponentAccumulators(spec.window(cfg), cfg, config.quadrature), config.stride
        )
        for spec in config.estimators
    ]
    simulate(config.sim_plan(), recorders)
    for spec, rec in zip(config.estimators, recorders):
        rec.record_final(config.dt)
        series = estimator_time_series(rec.snapshots, spec, cfg, params)
        _write_csv(
            out / f"estimate_{spec.label}.csv",
            "t,estimate,kind",
            ([_fmt(t), _fmt(v), spec.kind] for t, v in series),
        )
        _write_csv(
            out / f"functional_{spec.label}.csv",
            "t,J_t",
            ([_fmt(s.t), _fmt(s.full)] for s in rec.snapshots),
        )
        final = Estimate(
            value=series[-1][1] if series else math.nan,
            kind=spec.kind,
            window_desc=spec.label,
            horizon=config.t_horizon,
        )
        print(f"{final.window_desc}: {final.value:.6g} (T = {final.horizon:g})")
    return EXIT_OK


def cmd_variance(config: RunConfig) -> int:
    cfg = config.spectral
    params = config.params
    print("estimator,variance")
    for spec in config.estimators:
        lv = limiting_variance(spec, params, cfg)
        print(f"{spec.label},{_fmt(None if lv is None else lv.value)}")
    return EXIT_OK


def cmd_montecarlo(config: RunConfig, n_jobs: int) -> int:
    out = _out_dir(config)
    report = run_monte_carlo(config.mc_plan(), n_jobs=n_jobs)
    _write_csv(
        out / "report.csv",
        "estimator,mean,var,var_theoretical,rel_err_max,rel_err_p75,sw_w,sw_p",
        (
            [
                rep.label,
                _fmt(rep.mean),
                _fmt(rep.variance_scaled),
                _fmt(rep.variance_theoretical),
                _fmt(rep.rel_err_max),
                _fmt(rep.rel_err_p75),
                _fmt(rep.sw_w),
                _fmt(rep.sw_p),
            ]
            for rep in report.reports
        ),
    )
    for spec, rep in zip(config.estimators, report.reports):
        _write_csv(
            out / f"samples_{spec.label}.csv",
            "replication,estimate",
            ([str(i), _fmt(x)] for i, x in enumerate(rep.sample)),
        )
        true_value = report.true_a if spec.estimates_parameter == "a" else report.true_b
        points = qq_points(rep.scaled_sample(true_value, report.t_horizon))
        _write_csv(
            out / f"qq_{spec.label}.csv",
            "theoretical,empirical",
            ([_fmt(p), _fmt(q)] for p, q in points),
        )
    print(f"wrote {out / 'report.csv'} ({report.replications} replications)")
    return EXIT_OK


def cmd_qq(config: RunConfig) -> int:
    out = _out_dir(config)
    sqrt_t = math.sqrt(config.t_horizon)
    for spec in config.estimators:
        samples_path = out / f"samples_{spec.label}.csv"
        if not samples_path.exists():
            raise FileNotFoundError(f"{samples_path} not found; run montecarlo first")
        sample = np.loadtxt(samples_path, delimiter=",", skiprows=1, usecols=1, ndmin=1)
        true_value = config.a if spec.estimates_parameter == "a" else config.b
        points = qq_points(sqrt_t * (sample - true_value))
        _write_csv(
            out / f"qq_{spec.label}.csv",
            "theoretical,empirical",
            ([_fmt(p), _fmt(q)] for p, q in points),
        )
    print(f"wrote Q-Q points for {len(config.estimators)} estimators to {out}")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dampedwave",
        description="Simulation and minimum-contrast inference for the damped "
        "stochastic wave equation in spectral form.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("simulate", "integrate one trajectory and dump it as CSV"),
        ("estimate", "estimator time series from one trajectory"),
        ("variance", "print theoretical limiting variances"),
        ("montecarlo", "replicated study: report, samples, and Q-Q CSVs"),
        ("qq", "regenerate Q-Q CSVs from persisted samples"),
    ]:
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("config", nargs="?", default=None, help="YAML run configuration")
        cmd.add_argument("--preset", choices=PRESET_NAMES, default=None, help="bundled configuration")
        cmd.add_argument("--out-dir", default=None, help="override the configured output directory")
        cmd.add_argument("--seed", type=int, default=None, help="override the configured seed")
        if name == "montecarlo":
            cmd.add_argument("--jobs", type=int, default=1, help="parallel replication workers")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = _resolve_config(args)
        if args.command == "simulate":
            return cmd_simulate(config)
        if args.command == "estimate":
            return cmd_estimate(config)
        if args.command == "variance":
            return cmd_variance(config)
        if args.command == "montecarlo":
            return cmd_montecarlo(config, n_jobs=args.jobs)
        return cmd_qq(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrationDivergedError as exc:
        print(f"integration diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (OSError, FileNotFoundError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except DampedWaveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
