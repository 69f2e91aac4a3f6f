"""
Experiment harness: presets, seeded instances, runs, artifacts and the CLI.

Plotting lives in `accelmirror.harness.plotting` and needs the ``plot`` extra.
"""

from .checks import CheckResult, run_checks
from .config import PRESETS, ExperimentConfig, load_config_file, make_config
from .instances import ProblemInstance, build_instance
from .rates import RateFit, fit_rate
from .runner import ExperimentResult, ExperimentRunner, RunArtifacts, run_preset, step_size

__all__ = [
    "PRESETS",
    "CheckResult",
    "ExperimentConfig",
    "ExperimentResult",
    "ExperimentRunner",
    "ProblemInstance",
    "RateFit",
    "RunArtifacts",
    "build_instance",
    "fit_rate",
    "load_config_file",
    "make_config",
    "run_checks",
    "step_size",
]
