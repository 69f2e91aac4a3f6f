"""
Experiment runner.

Handles step-size selection, execution of the selected algorithms on one
instance (optionally in a thread pool), and emission of the run artifacts.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .. import __version__
from .._common import ConfigError
from .._random import SeededStream
from .._trace import TraceRecord
from ..algorithms import RunConfig, gap_tolerance, make_solver, run
from ..linops import PrimalVec
from ..mirror import MirrorMap
from ..objectives import Objective, QuadraticObjective
from ..regularizers import default_regularizer
from .artifacts import METADATA_NAME, csv_name, write_metadata, write_trace_csv
from .config import ExperimentConfig
from .instances import ProblemInstance, build_instance, reference_step_size

logger = logging.getLogger(__name__)

# Mirror descent runs in dual form: the primal form needs grad phi(x_k), which
# stops existing once a coordinate of x_k underflows to zero.
SOLVER_TAGS: dict[str, str] = {
    "mirror_descent": "mirror_descent_dual",
    "amd": "amd",
    "amdr": "amdr",
}


# ---------------------------
# Step sizes
# ---------------------------


@dataclass(frozen=True)
class StepSizes:
    """
    Step size per algorithm plus the constants that produced it.

    ``smoothness`` is ``L_f`` under the absolute policy, ``L_r`` under the
    relative one, and None for explicit step sizes.
    """

    policy: str
    h: dict[str, float]
    smoothness: float | None = None
    L_chi: float | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    def metadata(self) -> dict[str, Any]:
        return {
            "policy": self.policy,
            "h": dict(self.h),
            "smoothness": self.smoothness,
            "L_chi": self.L_chi,
            **self.extra,
        }


def amdr_step_size(L: float, d: int, eps: float, gamma: float) -> float:
    """``sqrt(eps / (2 (1 + d eps) L gamma))``."""
    return math.sqrt(eps / (2.0 * (1.0 + d * eps) * L * gamma))


def step_size(
    policy: str,
    mirror: MirrorMap,
    objective: Objective,
    algorithms: tuple[str, ...],
    *,
    x_star: Any = None,
    explicit_h: float | None = None,
    eps: float = 0.3,
    amdr_gamma: float = 1.0,
    relative_at: str = "optimum",
) -> StepSizes:
    """
    Pick ``h`` for every algorithm.

    - ``absolute``: ``h = 1/(L_chi L_f)`` for mirror descent and AMD, and
      ``sqrt(eps / (2 (1 + d eps) L_f gamma))`` for AMDR.
    - ``relative``: the same formulas with ``L_r``, the spectral radius of
      ``D(x*)^{1/2} G D(x*)^{1/2}``, in place of ``L_f``.
      ``x_star`` may be any simplex point; ``relative_at`` labels it in the
      metadata.
    - ``explicit``: ``explicit_h`` for every algorithm.

    Raises:
        ConfigError: If the policy needs data that is absent (``x*`` for the
            relative policy, a quadratic objective, a smoothness constant).
    """
    if policy == "explicit":
        if explicit_h is None:
            raise ConfigError("the explicit step policy needs a value of h")
        return StepSizes(policy, {a: float(explicit_h) for a in algorithms})

    if policy == "absolute":
        L = objective.absolute_smoothness(mirror.primal_norm)
        extra = {"L_f": L}
    elif policy == "relative":
        if not isinstance(objective, QuadraticObjective) or mirror.geometry != "simplex":
            raise ConfigError("the relative step policy is defined for quadratics on the simplex")
        if x_star is None:
            raise ConfigError("the relative step policy needs the minimizer x*")
        L = objective.relative_smoothness(x_star)
        extra = {
            "L_r": L,
            "L_r_point": relative_at,
            "L_f": objective.absolute_smoothness(mirror.primal_norm),
        }
    else:
        raise ConfigError(f"Unknown step policy {policy!r}")
    if not L > 0.0:
        raise ConfigError(f"smoothness constant must be positive, got {L!r}")

    h: dict[str, float] = {}
    for algorithm in algorithms:
        if algorithm == "amdr":
            h[algorithm] = amdr_step_size(L, mirror.d, eps, amdr_gamma)
        else:
            h[algorithm] = 1.0 / (mirror.L_chi * L)
    logger.debug("step sizes (%s, L=%r): %s", policy, L, h)
    return StepSizes(policy, h, smoothness=L, L_chi=mirror.L_chi, extra=extra)


def amd_iterate(instance: ProblemInstance, k: int) -> PrimalVec:
    """``x_k`` of an AMD run from ``instance.x0`` with ``h = 1/(L_chi L_f)``."""
    h = reference_step_size(instance.mirror, instance.objective)
    cfg = RunConfig(instance.mirror, instance.objective, instance.x0, h, k)
    *_, last = make_solver("amd", cfg).states()
    logger.debug("L_r measured at AMD iterate %d (h=%r)", k, h)
    return last.x


# ---------------------------
# Runner
# ---------------------------


@dataclass
class ExperimentResult:
    """Traces of one preset run, keyed by algorithm in the fixed order."""

    config: ExperimentConfig
    instance: ProblemInstance
    steps: StepSizes
    traces: dict[str, list[TraceRecord]]

    def min_gaps(self) -> dict[str, float]:
        return {a: min(r.f_gap for r in trace) for a, trace in self.traces.items()}

    def below_reference(self) -> list[str]:
        """Algorithms whose iterates beat ``f*`` by more than the gap tolerance."""
        tol = gap_tolerance(self.instance.f_star)
        return [a for a, gap in self.min_gaps().items() if gap < -tol]

    def metadata(self) -> dict[str, Any]:
        cfg = self.config
        stream_info = self.instance.random or SeededStream(cfg.seed).describe()
        return {
            "accelmirror_version": __version__,
            "preset": cfg.preset,
            "config": cfg.as_dict(),
            "overrides": cfg.overrides,
            "random": stream_info,
            "step_sizes": self.steps.metadata(),
            "L_chi": self.instance.mirror.L_chi,
            "gamma_schedule": cfg.schedule.describe(),
            "amdr": {"r": cfg.r, "gamma": cfg.amdr_gamma, "eps": cfg.eps},
            "optimum": {
                **self.instance.provenance(),
                "interior": self.instance.interior,
                "x0": self.instance.x0.tolist(),
                "min_f_gap": self.min_gaps(),
                "below_reference": self.below_reference(),
            },
            "files": {a: csv_name(a) for a in self.traces},
        }


class ExperimentRunner:
    """Runs the algorithms of one ``ExperimentConfig``."""

    def __init__(self, config: ExperimentConfig, *, show_progress: bool = False):
        self.config = config
        self.show_progress = show_progress

    def prepare(self) -> tuple[ProblemInstance, StepSizes]:
        cfg = self.config
        instance = build_instance(cfg, show_progress=self.show_progress)
        point, label = instance.x_star, "optimum"
        if cfg.step_policy_kind == "relative" and cfg.relative_iterate is not None:
            point = amd_iterate(instance, cfg.relative_iterate)
            label = cfg.relative_point
        steps = step_size(
            cfg.step_policy_kind,
            instance.mirror,
            instance.objective,
            cfg.algorithms,
            x_star=point,
            explicit_h=cfg.explicit_h,
            eps=cfg.eps,
            amdr_gamma=cfg.amdr_gamma,
            relative_at=label,
        )
        return instance, steps

    def run_one(self, algorithm: str, instance: ProblemInstance, h: float) -> list[TraceRecord]:
        cfg = self.config
        regularizer = None
        if algorithm == "amdr":
            regularizer = default_regularizer(instance.mirror, cfg.eps)
        run_config = RunConfig(
            mirror=instance.mirror,
            objective=instance.objective,
            x0=instance.x0,
            h=h,
            steps=cfg.steps,
            schedule=cfg.schedule,
            r=cfg.r,
            amdr_gamma=cfg.amdr_gamma,
            regularizer=regularizer,
            x_star=instance.x_star,
            f_star=instance.f_star,
            zeta_star=instance.zeta_star,
            dual_lyapunov=instance.interior,
            show_progress=self.show_progress,
        )
        return run(SOLVER_TAGS[algorithm], run_config)

    def run(self) -> ExperimentResult:
        """
        Execute every selected algorithm.

        With ``workers > 1`` the algorithms run in a thread pool; results are
        always returned in the fixed algorithm order.
        """
        cfg = self.config
        instance, steps = self.prepare()
        logger.info(
            "running %s (d=%d, N=%d, seed=%d): %s",
            cfg.preset,
            cfg.d,
            cfg.steps,
            cfg.seed,
            ", ".join(cfg.algorithms),
        )
        if cfg.workers > 1 and len(cfg.algorithms) > 1:
            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                futures = {
                    a: pool.submit(self.run_one, a, instance, steps.h[a]) for a in cfg.algorithms
                }
                traces = {a: futures[a].result() for a in cfg.algorithms}
        else:
            traces = {a: self.run_one(a, instance, steps.h[a]) for a in cfg.algorithms}
        logger.info("finished %s", cfg.preset)
        return ExperimentResult(cfg, instance, steps, traces)


@dataclass(frozen=True)
class RunArtifacts:
    result: ExperimentResult
    csv_paths: dict[str, Path]
    metadata_path: Path
    plot_path: Path | None = None


def run_preset(
    config: ExperimentConfig,
    out_dir: str | Path,
    *,
    plot: bool = False,
    show_progress: bool = False,
) -> RunArtifacts:
    """
    Run a config and write ``<algorithm>.csv`` files, ``metadata.json`` and,
    with ``plot``, ``convergence.svg`` into ``out_dir``.

    Raises:
        NumericalFailure: If a solver produces a non-finite value (carries ``k``).
        ImportError: If ``plot`` is set and plotly is missing.
    """
    result = ExperimentRunner(config, show_progress=show_progress).run()
    out = Path(out_dir)
    csv_paths = {a: write_trace_csv(out / csv_name(a), t) for a, t in result.traces.items()}
    metadata_path = write_metadata(out / METADATA_NAME, result.metadata())
    plot_path = None
    if plot:
        from .plotting import emit_plot

        plot_path = emit_plot(result.traces, out / "convergence.svg", title=config.preset)
    return RunArtifacts(result, csv_paths, metadata_path, plot_path)
