"""
accelmirror - Accelerated mirror descent on convex constraint sets.

This package provides:

- Mirror maps for three geometries (`EuclideanMirror`, `SimplexMirror`,
  `HypercubeMirror`) with both Bregman divergences
- Objectives (`QuadraticObjective`, `PowerObjective`, `FunctionObjective`)
- Discrete optimizers: mirror descent, accelerated mirror descent (AMD), AMD
  with regularization (AMDR), gradient descent and the three-term recursion,
  each with its discrete Lyapunov monitor (`run`, `RunConfig`)
- The continuous systems they discretize (`OdeSystem`), reference
  integration and consistency-order measurement

The experiment harness and its CLI live in `accelmirror.harness`.
"""

import logging

from ._common import (
    AccelMirrorError,
    ConfigError,
    ConvergenceError,
    DimensionError,
    DomainError,
    NumericalFailure,
    StepSizeUnderflowError,
)
from ._trace import SolverState, TraceRecord
from .algorithms import (
    ALGORITHMS,
    ReferenceOptimum,
    RunConfig,
    Solver,
    amd_primal_step,
    amd_step,
    amdr_step,
    gradient_descent_step,
    lyapunov_dual,
    lyapunov_primal,
    make_solver,
    mirror_descent_dual_step,
    mirror_descent_step,
    nesterov_three_term_step,
    reference_optimum,
    run,
)
from .linops import DenseMatrix, DualVec, PrimalVec, dual, norm, pairing, primal
from .mirror import (
    EuclideanMirror,
    FeasibleSet,
    HypercubeMirror,
    MirrorMap,
    SimplexMirror,
    make_mirror,
)
from .objectives import FunctionObjective, Objective, PowerObjective, QuadraticObjective
from .ode import (
    OdeSystem,
    Trajectory,
    ark_amd_step,
    consistency_order,
    integrate_reference,
    lyapunov_continuous,
)
from .regularizers import (
    EuclideanRegularizer,
    Regularizer,
    ShiftedEntropyRegularizer,
    regularized_argmin,
)
from .schedules import GammaSchedule

__version__ = "0.1.0"

logging.getLogger(__name__).addHandler(logging.NullHandler())

__all__ = [
    "ALGORITHMS",
    "AccelMirrorError",
    "ConfigError",
    "ConvergenceError",
    "DenseMatrix",
    "DimensionError",
    "DomainError",
    "DualVec",
    "EuclideanMirror",
    "EuclideanRegularizer",
    "FeasibleSet",
    "FunctionObjective",
    "GammaSchedule",
    "HypercubeMirror",
    "MirrorMap",
    "NumericalFailure",
    "Objective",
    "OdeSystem",
    "PowerObjective",
    "PrimalVec",
    "QuadraticObjective",
    "ReferenceOptimum",
    "Regularizer",
    "RunConfig",
    "ShiftedEntropyRegularizer",
    "SimplexMirror",
    "Solver",
    "SolverState",
    "StepSizeUnderflowError",
    "TraceRecord",
    "Trajectory",
    "__version__",
    "amd_primal_step",
    "amd_step",
    "amdr_step",
    "ark_amd_step",
    "consistency_order",
    "dual",
    "gradient_descent_step",
    "integrate_reference",
    "lyapunov_continuous",
    "lyapunov_dual",
    "lyapunov_primal",
    "make_mirror",
    "make_solver",
    "mirror_descent_dual_step",
    "mirror_descent_step",
    "nesterov_three_term_step",
    "norm",
    "pairing",
    "primal",
    "reference_optimum",
    "regularized_argmin",
    "run",
]
