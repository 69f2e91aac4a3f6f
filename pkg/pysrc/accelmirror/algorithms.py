"""
Discrete optimizers and their Lyapunov monitors.

Step functions are pure: each takes a ``SolverState`` and returns the next one.
``Solver`` subclasses bundle a step with its initial state and its discrete
Lyapunov function, and ``run`` drives a solver for ``N`` steps, emitting one
``TraceRecord`` per iterate ``k = 0..N``.

Shipped algorithms (tag -> method):
  - ``gradient_descent``: ``x <- x - h grad f(x)`` (Euclidean only)
  - ``nesterov``: the three-term accelerated recursion (Euclidean only)
  - ``mirror_descent``: ``x <- chi(grad phi(x) - h grad f(x))``
  - ``mirror_descent_dual``: ``zeta <- zeta - h grad f(chi(zeta))``
  - ``amd``: accelerated mirror descent, primal/dual form
  - ``amd_primal``: the same method written with ``z_k = chi(zeta_k)``
  - ``amdr``: accelerated mirror descent with a regularized argmin step
"""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from collections.abc import Iterator
from dataclasses import dataclass, field, replace
from typing import Any, ClassVar, Final

import numpy as np
from tqdm import tqdm

from ._common import (
    AMDR_GAMMA,
    AMDR_R,
    STEP3_DRIFT_TOL,
    ConfigError,
    DomainError,
    NumericalFailure,
    frozen,
    validate_positive,
)
from ._trace import SolverState, TraceRecord
from .linops import DualVec, PrimalVec, primal
from .mirror import MirrorMap
from .objectives import Objective
from .regularizers import Regularizer, default_regularizer
from .schedules import GammaSchedule

logger = logging.getLogger(__name__)

BOUNDARY_THRESHOLD: Final[float] = 1e-10
NEGLIGIBLE_MASS: Final[float] = 1e-30
REFERENCE_FACTOR: Final[int] = 10
NEGATIVE_GAP_TOL: Final[float] = 1e-9


def _p(arr: Any) -> PrimalVec:
    return PrimalVec(frozen(np.asarray(arr, dtype=np.float64)))


def _d(arr: Any) -> DualVec:
    return DualVec(frozen(np.asarray(arr, dtype=np.float64)))


def _require_euclidean(m: MirrorMap, what: str) -> None:
    if m.geometry != "euclidean":
        raise DomainError(f"{what} runs on the euclidean geometry only, not {m.geometry}")


# ---------------------------
# Step functions
# ---------------------------


def gradient_descent_step(state: SolverState, f: Objective, h: float) -> SolverState:
    """``x_{k+1} = x_k - h grad f(x_k)``."""
    g = f.gradient(state.x)
    return SolverState(k=state.k + 1, x=_p(state.x - h * g), zeta=None, y=state.x)


def nesterov_three_term_step(
    x_k: Any,
    x_prev: Any | None,
    k: int,
    schedule: GammaSchedule,
    f: Objective,
    h: float,
) -> tuple[PrimalVec, PrimalVec]:
    """
    One step of the three-term accelerated recursion.

    ``y_k = x_k + beta_{k-1} (x_k - x_{k-1})`` with
    ``beta_{k-1} = (gamma_{k-1} - 1) / gamma_k``, then
    ``x_{k+1} = y_k - h grad f(y_k)``. At ``k = 0`` (``x_prev`` None) ``y_0 = x_0``.

    Returns:
        ``(x_{k+1}, y_k)``.
    """
    x = np.asarray(x_k, dtype=np.float64)
    if k == 0 or x_prev is None:
        y = x
    else:
        beta = (schedule.value(k - 1) - 1.0) / schedule.value(k)
        y = x + beta * (x - np.asarray(x_prev, dtype=np.float64))
    g = f.gradient(y)
    return _p(y - h * g), _p(y)


def mirror_descent_step(
    state: SolverState, m: MirrorMap, f: Objective, h: float
) -> SolverState:
    """
    ``x_{k+1} = chi(grad phi(x_k) - h grad f(x_k))``.

    The dual argument is kept as ``state.zeta`` so the trace can report the dual
    Lyapunov value.

    Raises:
        DomainError: If ``x_k`` is on the boundary.
    """
    g = f.gradient(state.x)
    zeta = _d(m.grad_phi(state.x) - h * g)
    return SolverState(k=state.k + 1, x=m.chi(zeta), zeta=zeta, y=state.x)


def mirror_descent_dual_step(
    state: SolverState, m: MirrorMap, f: Objective, h: float
) -> SolverState:
    """``zeta_{k+1} = zeta_k - h grad f(chi(zeta_k))``, ``x_{k+1} = chi(zeta_{k+1})``."""
    if state.zeta is None:
        raise ConfigError("mirror_descent_dual_step needs a dual iterate")
    y = m.chi(state.zeta)
    zeta = _d(state.zeta - h * f.gradient(y))
    return SolverState(k=state.k + 1, x=m.chi(zeta), zeta=zeta, y=y)


def amd_step(
    state: SolverState,
    m: MirrorMap,
    f: Objective,
    schedule: GammaSchedule,
    h: float,
    *,
    debug: bool = False,
) -> SolverState:
    """
    One step of accelerated mirror descent.

        y_k        = x_k + (chi(zeta_k) - x_k) / gamma_k
        zeta_{k+1} = zeta_k - gamma_k h grad f(y_k)
        x_{k+1}    = y_k + (chi(zeta_{k+1}) - chi(zeta_k)) / gamma_k

    With ``debug`` set, the equivalent update
    ``x_{k+1} = x_k + (chi(zeta_{k+1}) - x_k) / gamma_k`` is evaluated too and a
    warning is logged when the two differ by more than 1e-12.
    """
    if state.zeta is None:
        raise ConfigError("amd_step needs a dual iterate")
    gk = state.gamma
    chi_k = m.chi(state.zeta)
    y = state.x + (chi_k - state.x) / gk
    g = f.gradient(y)
    zeta = state.zeta - gk * h * g
    chi_next = m.chi(zeta)
    x = y + (chi_next - chi_k) / gk
    if debug:
        alt = state.x + (chi_next - state.x) / gk
        drift = float(np.max(np.abs(x - alt)))
        if drift > STEP3_DRIFT_TOL:
            logger.warning("AMD step %d: step-3 forms drift by %.3e", state.k, drift)
    return SolverState(
        k=state.k + 1,
        x=_p(x),
        zeta=_d(zeta),
        y=_p(y),
        gamma=schedule.value(state.k + 1),
    )


def amd_primal_step(
    state: SolverState,
    m: MirrorMap,
    f: Objective,
    schedule: GammaSchedule,
    h: float,
) -> SolverState:
    """
    Accelerated mirror descent in terms of primal points ``z_k = chi(zeta_k)``.

        y_k     = x_k + (z_k - x_k) / gamma_k
        z_{k+1} = chi(grad phi(z_k) - gamma_k h grad f(y_k))
        x_{k+1} = y_k + (z_{k+1} - z_k) / gamma_k

    Raises:
        DomainError: If ``z_k`` is on the boundary.
    """
    if state.z is None:
        raise ConfigError("amd_primal_step needs a primal mirror point z")
    gk = state.gamma
    z = state.z
    y = state.x + (z - state.x) / gk
    g = f.gradient(y)
    zeta = _d(m.grad_phi(z) - gk * h * g)
    z_next = m.chi(zeta)
    x = y + (z_next - z) / gk
    return SolverState(
        k=state.k + 1,
        x=_p(x),
        zeta=zeta,
        y=_p(y),
        gamma=schedule.value(state.k + 1),
        z=z_next,
    )


def amdr_step(
    state: SolverState,
    m: MirrorMap,
    f: Objective,
    h: float,
    r: float,
    gamma: float,
    reg: Regularizer,
) -> SolverState:
    """
    One step of accelerated mirror descent with regularization.

        y_k        = x_k + r / (r + k) (chi(zeta_k) - x_k)
        zeta_{k+1} = zeta_k - (k h / r) grad f(y_k)
        x_{k+1}    = argmin_{x in X} gamma h <grad f(y_k), x> + R(x, y_k)
    """
    if state.zeta is None:
        raise ConfigError("amdr_step needs a dual iterate")
    k = state.k
    lam = r / (r + k)
    y = _p(state.x + lam * (m.chi(state.zeta) - state.x))
    g = f.gradient(y)
    zeta = _d(state.zeta - (k * h / r) * g)
    x = reg.argmin(m, g, y, gamma * h)
    return SolverState(k=k + 1, x=x, zeta=zeta, y=y, gamma=gamma)


# ---------------------------
# Lyapunov monitors
# ---------------------------


def _gap(f: Objective, x: Any, x_star: Any, f_star: float | None) -> float:
    fs = f.value(x_star) if f_star is None else f_star
    return f.value(x) - fs


def amd_weight(schedule: GammaSchedule, k: int, h: float) -> float:
    """``(gamma_k^2 - gamma_k) h``; zero at ``k = 0`` for every schedule with gamma_0 = 1."""
    g = schedule.value(k)
    return (g * g - g) * h


def lyapunov_dual(
    m: MirrorMap,
    f: Objective,
    state: SolverState,
    schedule: GammaSchedule,
    h: float,
    x_star: Any,
    zeta_star: Any,
    f_star: float | None = None,
) -> float:
    """``(gamma_k^2 - gamma_k) h (f(x_k) - f*) + D_psi*(zeta_k, zeta*)``."""
    if state.zeta is None:
        raise ConfigError("the dual Lyapunov function needs a dual iterate")
    weight = amd_weight(schedule, state.k, h)
    return weight * _gap(f, state.x, x_star, f_star) + m.bregman_dual(state.zeta, zeta_star)


def lyapunov_primal(
    m: MirrorMap,
    f: Objective,
    state: SolverState,
    schedule: GammaSchedule,
    h: float,
    x_star: Any,
    f_star: float | None = None,
) -> float:
    """
    ``(gamma_k^2 - gamma_k) h (f(x_k) - f*) + D_phi(x*, chi(zeta_k))``.

    Defined for boundary minimizers. For the primal form of AMD the stored
    ``z_k`` is used for ``chi(zeta_k)``.
    """
    weight = amd_weight(schedule, state.k, h)
    point = _mirror_point(m, state)
    gap = _gap(f, state.x, x_star, f_star)
    return weight * gap + m.bregman_primal(x_star, point, allow_boundary=True)


def _mirror_point(m: MirrorMap, state: SolverState) -> PrimalVec:
    if state.z is not None:
        return state.z
    if state.zeta is None:
        raise ConfigError("state carries neither z nor zeta")
    return m.chi(state.zeta)


# ---------------------------
# Run configuration
# ---------------------------


@dataclass(frozen=True)
class RunConfig:
    """
    Everything a single solver run needs.

    ``x_star``/``f_star``/``zeta_star`` are optional. ``run`` fills ``f_star``
    from ``x_star`` or, lacking both, from a reference AMD run. ``zeta_star``
    defaults to ``grad phi(x_star)`` when ``x_star`` is interior, unless
    ``dual_lyapunov`` is off (minimizer known to sit on the boundary).

    Raises:
        ConfigError: For nonpositive ``h``, negative ``steps`` or shape mismatches.
        DomainError: If ``x0`` is outside the feasible set.
    """

    mirror: MirrorMap
    objective: Objective
    x0: Any
    h: float
    steps: int
    schedule: GammaSchedule = field(default_factory=GammaSchedule.nesterov)
    r: float = AMDR_R
    amdr_gamma: float = AMDR_GAMMA
    regularizer: Regularizer | None = None
    x_star: Any = None
    f_star: float | None = None
    zeta_star: Any = None
    dual_lyapunov: bool = True
    debug: bool = False
    show_progress: bool = False

    def __post_init__(self) -> None:
        if self.mirror.d != self.objective.d:
            raise ConfigError(
                f"mirror dimension {self.mirror.d} != objective dimension {self.objective.d}"
            )
        if isinstance(self.steps, bool) or not isinstance(self.steps, (int, np.integer)) or self.steps < 0:
            raise ConfigError(f"steps must be a nonnegative integer, got {self.steps!r}")
        try:
            validate_positive(self.h, "h")
        except DomainError as exc:
            raise ConfigError(str(exc)) from None
        x0 = primal(self.x0)
        if not self.mirror.feasible_set.contains(x0):
            raise DomainError(f"x0 must lie in the {self.mirror.geometry} feasible set")
        object.__setattr__(self, "x0", x0)
        if self.x_star is not None:
            object.__setattr__(self, "x_star", primal(self.x_star))
        if self.zeta_star is not None:
            object.__setattr__(self, "zeta_star", DualVec(frozen(np.array(self.zeta_star, dtype=np.float64))))
        elif (
            self.dual_lyapunov
            and self.x_star is not None
            and self.mirror.feasible_set.in_relative_interior(self.x_star)
        ):
            object.__setattr__(self, "zeta_star", self.mirror.grad_phi(self.x_star))

    def with_optimum(
        self, x_star: Any, f_star: float | None = None, *, interior: bool = True
    ) -> RunConfig:
        return replace(
            self, x_star=x_star, f_star=f_star, zeta_star=None, dual_lyapunov=interior
        )


# ---------------------------
# Solvers
# ---------------------------


class Solver(ABC):
    """
    A discrete optimizer bound to one ``RunConfig``.

    Concrete subclasses must implement:
      - initial_state()
      - step(state)
      - lyapunov_weight(k)
    and may override ``dual_point`` / ``mirror_point`` to say where the
    divergences of the Lyapunov function are measured.
    """

    tag: ClassVar[str]

    def __init__(self, config: RunConfig):
        self.config = config
        self.m = config.mirror
        self.f = config.objective
        self.h = float(config.h)
        self.schedule = config.schedule

    @abstractmethod
    def initial_state(self) -> SolverState:
        """State at k = 0."""

    @abstractmethod
    def step(self, state: SolverState) -> SolverState:
        """Advance one iteration."""

    @abstractmethod
    def lyapunov_weight(self, k: int) -> float:
        """Weight multiplying ``f(x_k) - f*`` in the discrete Lyapunov function."""

    def mirror_point(self, state: SolverState) -> PrimalVec:
        return _mirror_point(self.m, state)

    def dual_point(self, state: SolverState) -> DualVec | None:
        return state.zeta

    # ---- Monitors ----

    def lyapunov_values(
        self, state: SolverState, f_gap: float
    ) -> tuple[float | None, float | None]:
        cfg = self.config
        if cfg.x_star is None:
            return None, None
        weight = self.lyapunov_weight(state.k)
        lyap_primal = weight * f_gap + self.m.bregman_primal(
            cfg.x_star, self.mirror_point(state), allow_boundary=True
        )
        lyap_dual = None
        dual_pt = self.dual_point(state)
        if cfg.zeta_star is not None and dual_pt is not None:
            lyap_dual = weight * f_gap + self.m.bregman_dual(dual_pt, cfg.zeta_star)
        return lyap_primal, lyap_dual

    def record(self, state: SolverState, f_star: float) -> TraceRecord:
        f_gap = self.f.value(state.x) - f_star
        if not math.isfinite(f_gap):
            raise NumericalFailure(
                f"{self.tag}: non-finite f_gap at k={state.k}", k=state.k, quantity="f_gap"
            )
        lyap_primal, lyap_dual = self.lyapunov_values(state, f_gap)
        return TraceRecord(state.k, f_gap, lyap_primal, lyap_dual)

    # ---- Iteration ----

    def states(self) -> Iterator[SolverState]:
        """Yield the states for ``k = 0..steps``."""
        state = self.initial_state()
        yield state
        with tqdm(
            total=self.config.steps,
            desc=self.tag,
            disable=not self.config.show_progress,
            leave=False,
        ) as pbar:
            for _ in range(self.config.steps):
                state = self.step(state)
                _check_finite(state, self.tag)
                pbar.update(1)
                yield state


def _check_finite(state: SolverState, tag: str) -> None:
    for name in ("x", "zeta", "y", "z"):
        value = getattr(state, name)
        if value is not None and not np.all(np.isfinite(value)):
            raise NumericalFailure(
                f"{tag}: non-finite {name} at k={state.k}", k=state.k, quantity=name
            )


class GradientDescentSolver(Solver):
    """Euclidean gradient descent; Lyapunov ``k h (f - f*) + 1/2 ||x - x*||^2``."""

    tag: ClassVar[str] = "gradient_descent"

    def __init__(self, config: RunConfig):
        _require_euclidean(config.mirror, "gradient descent")
        super().__init__(config)

    def initial_state(self) -> SolverState:
        x0 = self.config.x0
        return SolverState(k=0, x=x0, zeta=None, y=x0)

    def step(self, state: SolverState) -> SolverState:
        return gradient_descent_step(state, self.f, self.h)

    def lyapunov_weight(self, k: int) -> float:
        return k * self.h

    def mirror_point(self, state: SolverState) -> PrimalVec:
        return state.x

    def dual_point(self, state: SolverState) -> DualVec | None:
        return _d(state.x)


class NesterovSolver(Solver):
    """
    Three-term accelerated recursion.

    The dual variable of the equivalent AMD run,
    ``zeta_k = x_{k-1} + gamma_{k-1}(x_k - x_{k-1})``, is carried in the state
    so both Lyapunov functions can be reported.
    """

    tag: ClassVar[str] = "nesterov"

    def __init__(self, config: RunConfig):
        _require_euclidean(config.mirror, "the three-term recursion")
        super().__init__(config)

    def initial_state(self) -> SolverState:
        x0 = self.config.x0
        return SolverState(k=0, x=x0, zeta=_d(x0), y=x0, gamma=self.schedule.value(0))

    def step(self, state: SolverState) -> SolverState:
        k = state.k
        x_next, y = nesterov_three_term_step(
            state.x, state.x_prev, k, self.schedule, self.f, self.h
        )
        zeta = _d(state.x + self.schedule.value(k) * (x_next - state.x))
        return SolverState(
            k=k + 1,
            x=x_next,
            zeta=zeta,
            y=y,
            gamma=self.schedule.value(k + 1),
            x_prev=state.x,
        )

    def lyapunov_weight(self, k: int) -> float:
        return amd_weight(self.schedule, k, self.h)


class MirrorDescentSolver(Solver):
    """Primal-form mirror descent; Lyapunov ``k h (f - f*) + D_phi(x*, x_k)``."""

    tag: ClassVar[str] = "mirror_descent"

    def initial_state(self) -> SolverState:
        x0 = self.config.x0
        return SolverState(k=0, x=x0, zeta=self.m.initial_dual(x0), y=x0)

    def step(self, state: SolverState) -> SolverState:
        return mirror_descent_step(state, self.m, self.f, self.h)

    def lyapunov_weight(self, k: int) -> float:
        return k * self.h

    def mirror_point(self, state: SolverState) -> PrimalVec:
        return state.x


class MirrorDescentDualSolver(MirrorDescentSolver):
    """Dual-form mirror descent, iterating on ``zeta``."""

    tag: ClassVar[str] = "mirror_descent_dual"

    def step(self, state: SolverState) -> SolverState:
        return mirror_descent_dual_step(state, self.m, self.f, self.h)


class AMDSolver(Solver):
    """Accelerated mirror descent."""

    tag: ClassVar[str] = "amd"

    def __init__(self, config: RunConfig):
        super().__init__(config)
        self.schedule.validate_for_amd()

    def initial_state(self) -> SolverState:
        x0 = self.config.x0
        return SolverState(
            k=0, x=x0, zeta=self.m.initial_dual(x0), y=x0, gamma=self.schedule.value(0)
        )

    def step(self, state: SolverState) -> SolverState:
        return amd_step(state, self.m, self.f, self.schedule, self.h, debug=self.config.debug)

    def lyapunov_weight(self, k: int) -> float:
        return amd_weight(self.schedule, k, self.h)


class PrimalAMDSolver(AMDSolver):
    """Accelerated mirror descent on primal mirror points ``z_k``."""

    tag: ClassVar[str] = "amd_primal"

    def initial_state(self) -> SolverState:
        state = super().initial_state()
        return state.evolve(z=self.config.x0)

    def step(self, state: SolverState) -> SolverState:
        return amd_primal_step(state, self.m, self.f, self.schedule, self.h)


class AMDRSolver(Solver):
    """
    Accelerated mirror descent with regularization.

    Lyapunov functions are evaluated at ``t = k delta``, ``delta = sqrt(h)``,
    which gives the weight ``k^2 h / r^2``.
    """

    tag: ClassVar[str] = "amdr"

    def __init__(self, config: RunConfig):
        super().__init__(config)
        self.r = validate_positive(config.r, "r")
        self.gamma = validate_positive(config.amdr_gamma, "gamma")
        self.reg = config.regularizer or default_regularizer(config.mirror)

    def initial_state(self) -> SolverState:
        x0 = self.config.x0
        return SolverState(
            k=0, x=x0, zeta=self.m.initial_dual(x0), y=x0, gamma=self.gamma
        )

    def step(self, state: SolverState) -> SolverState:
        return amdr_step(state, self.m, self.f, self.h, self.r, self.gamma, self.reg)

    def lyapunov_weight(self, k: int) -> float:
        return k * k * self.h / (self.r * self.r)


SOLVER_MAP: dict[str, type[Solver]] = {
    cls.tag: cls
    for cls in (
        GradientDescentSolver,
        NesterovSolver,
        MirrorDescentSolver,
        MirrorDescentDualSolver,
        AMDSolver,
        PrimalAMDSolver,
        AMDRSolver,
    )
}
ALGORITHMS: Final[tuple[str, ...]] = tuple(SOLVER_MAP)


def make_solver(tag: str, config: RunConfig) -> Solver:
    """
    Build the solver registered under ``tag``.

    Raises:
        ConfigError: If the tag is unknown.
    """
    try:
        cls = SOLVER_MAP[tag]
    except KeyError:
        raise ConfigError(
            f"Unknown algorithm {tag!r}; expected one of {', '.join(ALGORITHMS)}"
        ) from None
    return cls(config)


# ---------------------------
# Reference optimum
# ---------------------------


@dataclass(frozen=True)
class ReferenceOptimum:
    """
    Approximate minimizer from a long AMD run.

    Attributes:
        x_star: Iterate with the smallest objective among all reference
            ``x_k`` and ``chi(zeta_k)``.
        f_star: ``f(x_star)``.
        boundary: Indices where the final ``chi(zeta_N)`` is within 1e-10 of
            the boundary of X.
        steps: Length of the reference run.
        h: Step size of the reference run.
    """

    x_star: PrimalVec
    f_star: float
    boundary: tuple[int, ...]
    steps: int
    h: float

    @property
    def interior(self) -> bool:
        return not self.boundary

    def provenance(self) -> dict[str, Any]:
        return {
            "method": "amd",
            "schedule": "recurrence",
            "steps": self.steps,
            "h": self.h,
            "selection": "min f over x_k and chi(zeta_k), masses below 1e-30 dropped",
            "f_star": self.f_star,
            "boundary_components": len(self.boundary),
        }


def _drop_negligible(m: MirrorMap, x: PrimalVec) -> PrimalVec | None:
    """Zero out coordinates within 1e-30 of the boundary; None when nothing changes."""
    if m.geometry == "euclidean":
        return None
    small = (x > 0.0) & (x < NEGLIGIBLE_MASS)
    if not np.any(small):
        return None
    out = np.where(small, 0.0, x)
    if m.geometry == "simplex":
        out = out / out.sum()
    return _p(out)


def reference_optimum(
    m: MirrorMap,
    f: Objective,
    x0: Any,
    h: float,
    steps: int,
    *,
    show_progress: bool = False,
) -> ReferenceOptimum:
    """
    Run AMD (recurrence schedule) for ``steps`` steps and keep the best point.

    An experiment run of AMD with the same ``x0`` and ``h`` and at most ``steps``
    steps visits a subset of the reference iterates, so its gaps are
    nonnegative.
    """
    config = RunConfig(m, f, x0, h, steps, show_progress=show_progress)
    solver = AMDSolver(config)
    best_x: PrimalVec = config.x0
    best_f = f.value(best_x)
    final = config.x0
    for state in solver.states():
        final = m.chi(state.zeta)
        for cand in (state.x, final):
            val = f.value(cand)
            if val < best_f:
                best_x, best_f = cand, val
    cleaned = _drop_negligible(m, best_x)
    # Dropping sub-1e-30 masses moves f by roundoff at most.
    if cleaned is not None and f.value(cleaned) <= best_f + 4.0 * np.spacing(abs(best_f)):
        best_x, best_f = cleaned, f.value(cleaned)
    if m.geometry == "euclidean":
        boundary: tuple[int, ...] = ()
    else:
        near = final < BOUNDARY_THRESHOLD
        if m.geometry == "hypercube":
            near |= final > 1.0 - BOUNDARY_THRESHOLD
        boundary = tuple(int(i) for i in np.flatnonzero(near))
    logger.debug(
        "reference optimum: f*=%r after %d steps, %d boundary components",
        best_f,
        steps,
        len(boundary),
    )
    return ReferenceOptimum(best_x, float(best_f), boundary, steps, float(h))


def gap_tolerance(f_star: float) -> float:
    """How far below ``f*`` an objective value may fall before the optimum counts as inexact."""
    return NEGATIVE_GAP_TOL * max(1.0, abs(f_star))


# ---------------------------
# Driver
# ---------------------------


def run(tag: str, config: RunConfig) -> list[TraceRecord]:
    """
    Run algorithm ``tag`` and return the trace for ``k = 0..steps``.

    ``f*`` is taken from ``config.f_star``, else ``f(config.x_star)``, else a
    reference AMD run ten times longer than ``config.steps`` (at least one step)
    with the same ``h`` and ``x0``. Identical configs give identical traces.

    Raises:
        ConfigError: For an unknown tag.
        NumericalFailure: If a non-finite value appears; carries ``k``.
    """
    solver = make_solver(tag, config)
    if config.f_star is not None:
        f_star = float(config.f_star)
    elif config.x_star is not None:
        f_star = config.objective.value(config.x_star)
    else:
        ref = reference_optimum(
            config.mirror,
            config.objective,
            config.x0,
            config.h,
            max(1, REFERENCE_FACTOR * config.steps),
        )
        solver = make_solver(
            tag, config.with_optimum(ref.x_star, ref.f_star, interior=ref.interior)
        )
        f_star = ref.f_star

    logger.debug("run %s: h=%r steps=%d f*=%r", tag, config.h, config.steps, f_star)
    records: list[TraceRecord] = []
    warned = False
    tol = gap_tolerance(f_star)
    for state in solver.states():
        rec = solver.record(state, f_star)
        if rec.f_gap < -tol and not warned:
            logger.warning(
                "%s: negative f-gap %.3e at k=%d; reference optimum is not exact",
                tag,
                rec.f_gap,
                rec.k,
            )
            warned = True
        records.append(rec)
    return records
