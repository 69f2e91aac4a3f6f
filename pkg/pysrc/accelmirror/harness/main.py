"""
Command-line interface.

Sub-commands:
  - ``run``: run a preset and write CSV traces, metadata and an optional plot
  - ``rates``: fit the decay rate of a trace CSV
  - ``ode``: integrate a continuous system and dump the sampled trajectory
  - ``check``: run the invariant suite

Exit codes: 0 on success, 1 for usage and configuration errors, 2 for
numerical failures (the offending ``k`` and quantity go to stderr).
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any, NoReturn

import numpy as np

from .._common import ConfigError, ConvergenceError, DomainError, NumericalFailure
from .._random import SeededStream
from ..mirror import make_mirror
from ..objectives import Objective, PowerObjective
from ..ode import (
    DEFAULT_REFERENCE_TOL,
    INTEGRATOR_METHODS,
    SYSTEM_TAGS,
    OdeSystem,
    integrate_reference,
)
from .artifacts import read_trace_csv, write_trajectory_csv
from .checks import CHECKS, run_checks
from .config import PRESETS, load_config_file, make_config
from .instances import default_power_x0, draw_quadratic
from .rates import default_window, fit_rate
from .runner import run_preset

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2

# CLI flags that map one-to-one onto ExperimentConfig fields.
_RUN_FIELDS = (
    "geometry",
    "objective",
    "d",
    "p",
    "seed",
    "steps",
    "algorithms",
    "step_policy",
    "relative_point",
    "gamma_schedule",
    "r",
    "amdr_gamma",
    "eps",
    "x0",
    "workers",
)


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors with exit code 1."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging threshold for diagnostics on stderr",
    )
    common.add_argument(
        "-v", "--verbose", action="store_true", help="Shortcut for --log-level INFO"
    )

    parser = _Parser(
        prog="accelmirror",
        description="Accelerated mirror descent experiments and checks",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    # run
    run_p = sub.add_parser(
        "run",
        parents=[common],
        help="Run an experiment preset",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    run_p.add_argument("--preset", choices=list(PRESETS), default=None, help="Experiment preset")
    run_p.add_argument("--config", type=Path, default=None, help="Flat key = value config file")
    run_p.add_argument("--geometry", choices=["simplex", "hypercube", "euclidean"], default=None)
    run_p.add_argument("--objective", choices=["power", "quadratic"], default=None)
    run_p.add_argument("--d", type=int, default=None, help="Dimension")
    run_p.add_argument("--p", type=int, default=None, help="Exponent of the power objective")
    run_p.add_argument("--seed", type=int, default=None, help="Seed of the instance stream")
    run_p.add_argument("--steps", type=int, default=None, help="Iterations N")
    run_p.add_argument("--algorithms", default=None, help="Comma list from md, amd, amdr")
    run_p.add_argument(
        "--step-policy", default=None, help="absolute, relative or explicit:H"
    )
    run_p.add_argument(
        "--relative-point",
        default=None,
        help="where L_r is measured: optimum or iterate:K (relative policy)",
    )
    run_p.add_argument(
        "--gamma-schedule", default=None, help="recurrence, linear:R or constant (AMD)"
    )
    run_p.add_argument("--r", type=float, default=None, help="AMDR parameter r")
    run_p.add_argument("--amdr-gamma", type=float, default=None, help="AMDR parameter gamma")
    run_p.add_argument("--eps", type=float, default=None, help="AMDR shifted-entropy epsilon")
    run_p.add_argument("--x0", default=None, help="Starting point, comma separated")
    run_p.add_argument("--workers", type=int, default=None, help="Threads for the algorithm runs")
    run_p.add_argument("--out", type=Path, default=None, help="Output directory")
    run_p.add_argument("--plot", action="store_true", help="Write convergence.svg")
    run_p.add_argument("--progress", action="store_true", help="Show progress bars")
    run_p.add_argument(
        "--full-scale", action="store_true", help="Use d=1000 and 50000 steps for quadratics"
    )

    # rates
    rates_p = sub.add_parser("rates", parents=[common], help="Fit the decay rate of a trace")
    rates_p.add_argument("--csv", type=Path, required=True, help="Trace CSV written by run")
    rates_p.add_argument("--from", dest="k_lo", type=int, default=None, help="First k")
    rates_p.add_argument("--to", dest="k_hi", type=int, default=None, help="Last k")

    # ode
    ode_p = sub.add_parser(
        "ode",
        parents=[common],
        help="Dump a reference trajectory",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    ode_p.add_argument("--system", choices=list(SYSTEM_TAGS), required=True)
    ode_p.add_argument("--geometry", choices=["simplex", "hypercube", "euclidean"], default="simplex")
    ode_p.add_argument("--objective", choices=["power", "quadratic"], default="power")
    ode_p.add_argument("--d", type=int, default=2)
    ode_p.add_argument("--p", type=int, default=10)
    ode_p.add_argument("--seed", type=int, default=0)
    ode_p.add_argument("--x0", default=None, help="Starting point, comma separated")
    ode_p.add_argument("--r", type=float, default=3.0)
    ode_p.add_argument("--t0", type=float, default=None, help="Start time (system default if omitted)")
    ode_p.add_argument("--t1", type=float, default=10.0)
    ode_p.add_argument("--tol", type=float, default=DEFAULT_REFERENCE_TOL)
    ode_p.add_argument("--method", choices=list(INTEGRATOR_METHODS), default="DOP853")
    ode_p.add_argument("--samples", type=int, default=201, help="Output rows")
    ode_p.add_argument("--out", type=Path, required=True, help="Trajectory CSV")

    # check
    check_p = sub.add_parser("check", parents=[common], help="Run the invariant suite")
    check_p.add_argument(
        "--only", default=None, help=f"Comma list from {', '.join(CHECKS)}"
    )
    check_p.add_argument("--seed", type=int, default=0)

    return parser


def _configure_logging(args: argparse.Namespace) -> None:
    level = args.log_level
    if args.verbose and level == "WARNING":
        level = "INFO"
    logging.basicConfig(
        level=getattr(logging, level),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def _parse_vector(text: str | None) -> np.ndarray | None:
    if text is None:
        return None
    try:
        return np.array([float(v) for v in text.replace(",", " ").split()], dtype=np.float64)
    except ValueError:
        raise ConfigError(f"Invalid vector {text!r}") from None


def _truthy(text: Any) -> bool:
    return str(text).strip().lower() in ("1", "true", "yes", "on")


# ---------------------------
# Sub-commands
# ---------------------------


def cmd_run(args: argparse.Namespace) -> int:
    file_values: dict[str, Any] = load_config_file(args.config) if args.config else {}
    preset = args.preset or file_values.pop("preset", "custom")
    file_values.pop("preset", None)
    full_scale = args.full_scale or _truthy(file_values.pop("full_scale", False))

    overrides = dict(file_values)
    for name in _RUN_FIELDS:
        value = getattr(args, name)
        if value is not None:
            overrides[name] = value
    config = make_config(preset, overrides, full_scale=full_scale)

    out_dir = args.out or Path("runs") / config.preset
    artifacts = run_preset(config, out_dir, plot=args.plot, show_progress=args.progress)
    result = artifacts.result
    for algorithm, trace in result.traces.items():
        final = trace[-1]
        try:
            slope = f"{fit_rate(trace).slope:.4f}"
        except DomainError:
            slope = "n/a"
        print(
            f"{algorithm}: h={result.steps.h[algorithm]:.6g} "
            f"final f_gap={final.f_gap:.6e} slope={slope} -> {artifacts.csv_paths[algorithm]}"
        )
    print(f"metadata -> {artifacts.metadata_path}")
    if artifacts.plot_path is not None:
        print(f"plot -> {artifacts.plot_path}")
    return EXIT_OK


def cmd_rates(args: argparse.Namespace) -> int:
    records = read_trace_csv(args.csv)
    k_lo, k_hi = default_window(records)
    if args.k_lo is not None:
        k_lo = args.k_lo
    if args.k_hi is not None:
        k_hi = args.k_hi
    window = (k_lo, k_hi)
    fit = fit_rate(records, window)
    print(
        f"window=[{fit.k_lo}, {fit.k_hi}] points={fit.n_points} "
        f"slope={fit.slope:.6f} intercept={fit.intercept:.6f} residual={fit.residual:.3e}"
    )
    return EXIT_OK


def _ode_problem(args: argparse.Namespace) -> tuple[OdeSystem, np.ndarray]:
    m = make_mirror(args.geometry, args.d)
    x0 = _parse_vector(args.x0)
    f: Objective
    if args.objective == "power":
        f = PowerObjective(args.p, args.d)
        if x0 is None:
            x0 = default_power_x0(m)
    else:
        f, _, x0 = draw_quadratic(m, SeededStream(args.seed), x0)
    system = OdeSystem.from_tag(args.system, m, f, args.r)
    return system, np.asarray(x0)


def cmd_ode(args: argparse.Namespace) -> int:
    if args.samples < 2:
        raise ConfigError(f"--samples must be at least 2, got {args.samples}")
    system, x0 = _ode_problem(args)
    t0 = system.start_time if args.t0 is None else args.t0
    traj = integrate_reference(
        system, t0, args.t1, system.initial_state(x0), args.tol, method=args.method
    )
    times = np.linspace(traj.t0, traj.t1, args.samples)
    path = write_trajectory_csv(args.out, system.blocks, system.d, times, traj.sample(times))
    print(f"{system.tag}: {traj.t.size - 1} steps, {traj.nfev} rhs evaluations -> {path}")
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    names = [n.strip() for n in args.only.split(",") if n.strip()] if args.only else None
    results = run_checks(names, seed=args.seed)
    for res in results:
        status = "ok  " if res.passed else "FAIL"
        print(f"{status} {res.name}: {res.detail}")
    failed = sum(not r.passed for r in results)
    if failed:
        print(f"{failed} of {len(results)} checks failed", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


_COMMANDS = {
    "run": cmd_run,
    "rates": cmd_rates,
    "ode": cmd_ode,
    "check": cmd_check,
}


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point of the ``accelmirror`` console script."""
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"accelmirror: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ImportError as exc:
        print(f"accelmirror: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, NumericalFailure, DomainError) as exc:
        print(f"accelmirror: numerical failure: {exc}", file=sys.stderr)
        k = getattr(exc, "k", None)
        quantity = getattr(exc, "quantity", "")
        if k is not None or quantity:
            print(f"k={k if k is not None else ''} quantity={quantity}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"accelmirror: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
