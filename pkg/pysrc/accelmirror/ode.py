"""
Continuous-time systems behind the discrete optimizers.

An ``OdeSystem`` packs a mirror map and an objective into a vector field on a
flat state vector. Five systems ship:
  - ``gradient_flow``: ``x' = -grad f(x)`` (Euclidean only), state ``[x]``
  - ``mirror_flow_dual``: ``zeta' = -grad f(chi(zeta))``, state ``[zeta]``
  - ``mirror_flow_primal``: ``x' = chi'(grad phi(x)) (-grad f(x))``, state ``[x]``
  - ``accelerated_dual(r)``: ``zeta' = -(t/r) grad f(x)``,
    ``x' = (r/t)(chi(zeta) - x)``, state ``[zeta, x]``
  - ``accelerated_primal(r)``: ``z' = chi'(grad phi(z)) (-(t/r) grad f(x))``,
    ``x' = (r/t)(z - x)``, state ``[z, x]``

The accelerated fields are singular at ``t = 0`` and are only evaluated for
``t >= t0`` (default 1e-3). Reference trajectories come from
``scipy.integrate.solve_ivp`` with dense output.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Any, Final, Literal, cast

import numpy as np
from scipy.integrate import OdeSolution, solve_ivp

from ._common import (
    ODE_T0,
    ConfigError,
    ConvergenceError,
    DimensionError,
    DomainError,
    FloatArray,
    StepSizeUnderflowError,
    frozen,
    validate_positive,
)
from ._trace import SolverState
from .algorithms import amd_step
from .linops import DualVec, PrimalVec
from .mirror import EuclideanMirror, MirrorMap
from .objectives import Objective
from .schedules import GammaSchedule

logger = logging.getLogger(__name__)

SystemTag = Literal[
    "gradient_flow",
    "mirror_flow_dual",
    "mirror_flow_primal",
    "accelerated_dual",
    "accelerated_primal",
]
LyapunovTag = Literal["gf", "polyak", "dual", "primal"]

SYSTEM_TAGS: Final[tuple[SystemTag, ...]] = (
    "gradient_flow",
    "mirror_flow_dual",
    "mirror_flow_primal",
    "accelerated_dual",
    "accelerated_primal",
)
LYAPUNOV_TAGS: Final[tuple[LyapunovTag, ...]] = ("gf", "polyak", "dual", "primal")
INTEGRATOR_METHODS: Final[tuple[str, ...]] = ("DOP853", "RK45")

# Primal components may stray this far outside X inside integrator stages.
PRIMAL_RHS_TOL: Final[float] = 1e-9
DEFAULT_REFERENCE_TOL: Final[float] = 1e-12

_BLOCKS: Final[dict[SystemTag, tuple[str, ...]]] = {
    "gradient_flow": ("x",),
    "mirror_flow_dual": ("zeta",),
    "mirror_flow_primal": ("x",),
    "accelerated_dual": ("zeta", "x"),
    "accelerated_primal": ("z", "x"),
}


# ---------------------------
# Systems
# ---------------------------


@dataclass(frozen=True)
class OdeSystem:
    """
    A vector field on a flat state vector.

    Use the named constructors rather than the raw initializer. ``t0`` is
    the earliest time at which ``rhs`` may be evaluated: ``ODE_T0`` for the
    accelerated systems, 0 otherwise.

    Raises:
        ConfigError: For an unknown tag, a non-Euclidean gradient flow, or a
            missing ``r`` on an accelerated system.
        DimensionError: If mirror and objective dimensions differ.
        DomainError: If ``r <= 0`` or ``t0`` is not positive for an
            accelerated system.

    Example:
        ```python
        m = SimplexMirror(2)
        sys = OdeSystem.accelerated_dual(m, PowerObjective(10), r=2.0)
        traj = integrate_reference(sys, sys.t0, 5.0, sys.initial_state([0.999, 0.001]))
        ```
    """

    tag: SystemTag
    mirror: MirrorMap
    objective: Objective
    r: float | None = None
    t0: float | None = None

    def __post_init__(self) -> None:
        if self.tag not in SYSTEM_TAGS:
            raise ConfigError(
                f"Unknown ODE system {self.tag!r}; expected one of {', '.join(SYSTEM_TAGS)}"
            )
        if self.mirror.d != self.objective.d:
            raise DimensionError(
                f"mirror dimension {self.mirror.d} != objective dimension {self.objective.d}"
            )
        if self.tag == "gradient_flow" and self.mirror.geometry != "euclidean":
            raise ConfigError("gradient_flow is defined for the euclidean geometry only")
        if self.accelerated:
            if self.r is None:
                raise ConfigError(f"{self.tag} needs the parameter r")
            object.__setattr__(self, "r", validate_positive(self.r, "r"))
            t0 = ODE_T0 if self.t0 is None else self.t0
            object.__setattr__(self, "t0", validate_positive(t0, "t0"))
        else:
            t0 = 0.0 if self.t0 is None else float(self.t0)
            if not math.isfinite(t0) or t0 < 0.0:
                raise DomainError(f"t0 must be nonnegative, got {self.t0!r}")
            object.__setattr__(self, "t0", t0)

    # ---- Constructors ----

    @classmethod
    def gradient_flow(cls, f: Objective) -> OdeSystem:
        return cls("gradient_flow", EuclideanMirror(f.d), f)

    @classmethod
    def mirror_flow_dual(cls, m: MirrorMap, f: Objective) -> OdeSystem:
        return cls("mirror_flow_dual", m, f)

    @classmethod
    def mirror_flow_primal(cls, m: MirrorMap, f: Objective) -> OdeSystem:
        return cls("mirror_flow_primal", m, f)

    @classmethod
    def accelerated_dual(
        cls, m: MirrorMap, f: Objective, r: float, t0: float = ODE_T0
    ) -> OdeSystem:
        return cls("accelerated_dual", m, f, r, t0)

    @classmethod
    def accelerated_primal(
        cls, m: MirrorMap, f: Objective, r: float, t0: float = ODE_T0
    ) -> OdeSystem:
        return cls("accelerated_primal", m, f, r, t0)

    @classmethod
    def from_tag(
        cls, tag: str, m: MirrorMap, f: Objective, r: float | None = None
    ) -> OdeSystem:
        """Build a system by tag; ``r`` is ignored by the non-accelerated systems."""
        if tag == "gradient_flow":
            return cls.gradient_flow(f)
        accelerated = tag in ("accelerated_dual", "accelerated_primal")
        return cls(tag, m, f, r if accelerated else None)  # type: ignore[arg-type]

    # ---- Layout ----

    @property
    def d(self) -> int:
        return self.mirror.d

    @property
    def accelerated(self) -> bool:
        return self.tag in ("accelerated_dual", "accelerated_primal")

    @property
    def blocks(self) -> tuple[str, ...]:
        """Names of the state components, in storage order."""
        return _BLOCKS[self.tag]

    @property
    def dim(self) -> int:
        return self.d * len(self.blocks)

    @property
    def start_time(self) -> float:
        # __post_init__ always fills t0.
        return cast(float, self.t0)

    @property
    def rate(self) -> float:
        if self.r is None:
            raise ConfigError(f"{self.tag} carries no parameter r")
        return self.r

    def split(self, state: Any) -> tuple[FloatArray, ...]:
        """
        Cut a flat state into its blocks (views, not copies).

        Raises:
            DimensionError: If the state has the wrong length.
        """
        arr = np.asarray(state, dtype=np.float64)
        if arr.shape != (self.dim,):
            raise DimensionError(
                f"{self.tag} state must have length {self.dim}, got shape {arr.shape}"
            )
        d = self.d
        return tuple(arr[i * d : (i + 1) * d] for i in range(len(self.blocks)))

    def join(self, *parts: Any) -> FloatArray:
        if len(parts) != len(self.blocks):
            raise DimensionError(
                f"{self.tag} expects {len(self.blocks)} blocks, got {len(parts)}"
            )
        return np.concatenate([np.asarray(p, dtype=np.float64) for p in parts])

    def initial_state(self, x0: Any) -> FloatArray:
        """
        State at ``t0`` started from the primal point ``x0``.

        Dual components start at ``grad phi(x0)``, so ``x(t0) = chi(zeta(t0))``
        holds exactly up to the normal-space projection.

        Raises:
            DomainError: If a dual component is needed and ``x0`` is not in the
                relative interior.
        """
        m = self.mirror
        x = np.asarray(x0, dtype=np.float64)
        if x.shape != (self.d,):
            raise DimensionError(f"x0 must have length {self.d}, got shape {x.shape}")
        x = m.feasible_set.clamp_for_report(x)
        if not m.feasible_set.contains(x):
            raise DomainError(f"x0 must lie in the {m.geometry} feasible set")
        if self.tag in ("gradient_flow", "mirror_flow_primal"):
            return x
        if self.tag == "accelerated_primal":
            return self.join(x, x)
        zeta = np.asarray(m.initial_dual(x))
        if self.tag == "mirror_flow_dual":
            return np.array(zeta)
        return self.join(zeta, m.chi(zeta))

    def primal_position(self, state: Any) -> PrimalVec:
        """The point ``x`` the objective is evaluated at."""
        parts = self.split(state)
        if self.tag == "mirror_flow_dual":
            return self.mirror.chi(parts[0])
        return PrimalVec(frozen(parts[-1]))

    def mirror_point(self, state: Any) -> PrimalVec:
        """``chi(zeta)`` (or the stored ``z``) for accelerated systems, else the position."""
        parts = self.split(state)
        if self.tag == "accelerated_dual":
            return self.mirror.chi(parts[0])
        if self.tag == "accelerated_primal":
            return PrimalVec(frozen(parts[0]))
        return self.primal_position(state)

    # ---- Vector field ----

    def rhs(self, t: float, state: Any) -> FloatArray:
        """
        The time derivative of ``state`` at time ``t``.

        Primal-form systems accept boundary points of X, where the Jacobian
        action has a continuous extension.

        Raises:
            DomainError: If ``t < t0`` or a primal block lies outside X.
            DimensionError: If the state has the wrong length.
        """
        if t < self.start_time:
            raise DomainError(f"{self.tag} is evaluated at t={t!r} < t0={self.t0!r}")
        parts = self.split(state)
        m, f = self.mirror, self.objective
        if self.tag == "gradient_flow":
            return -np.asarray(f.gradient(parts[0]))
        if self.tag == "mirror_flow_dual":
            return -np.asarray(f.gradient(m.chi(parts[0])))
        if self.tag == "mirror_flow_primal":
            x = parts[0]
            return m.chi_prime_action(x, -np.asarray(f.gradient(x)), tol=PRIMAL_RHS_TOL)

        r = self.rate
        head, x = parts
        pull = -(t / r) * np.asarray(f.gradient(x))
        if self.tag == "accelerated_dual":
            return self.join(pull, (r / t) * (m.chi(head) - x))
        z_dot = m.chi_prime_action(head, pull, tol=PRIMAL_RHS_TOL)
        return self.join(z_dot, (r / t) * (head - x))

    def __call__(self, t: float, state: Any) -> FloatArray:
        return self.rhs(t, state)


def rhs(system: OdeSystem, t: float, state: Any) -> FloatArray:
    """Functional form of ``system.rhs``."""
    return system.rhs(t, state)


# ---------------------------
# AMD as an additive Runge-Kutta scheme
# ---------------------------


def ark_pieces(
    system: OdeSystem, t: float, state: Any
) -> tuple[FloatArray, FloatArray, FloatArray]:
    """
    The three additive pieces of the ``accelerated_dual`` field.

        g1 = (0, -(r/t) x)
        g2 = (0,  (r/t) chi(zeta))
        g3 = (-(t/r) grad f(x), 0)

    Their sum is ``system.rhs(t, state)``.
    """
    if system.tag != "accelerated_dual":
        raise ConfigError(f"the additive split is defined for accelerated_dual, not {system.tag}")
    zeta, x = system.split(state)
    r = system.rate
    zeros = np.zeros(system.d)
    g1 = system.join(zeros, -(r / t) * x)
    g2 = system.join(zeros, (r / t) * np.asarray(system.mirror.chi(zeta)))
    g3 = system.join(-(t / r) * np.asarray(system.objective.gradient(x)), zeros)
    return g1, g2, g3


def ark_amd_step(system: OdeSystem, state: Any, t_tilde: float, delta: float) -> FloatArray:
    """
    One AMD step written as an additive Runge-Kutta step of ``accelerated_dual``.

    With ``t_tilde = r delta gamma_k`` and ``h = delta^2`` the stages are
    ``(zeta_k, x_k)``, ``(zeta_k, y_k)`` and ``(zeta_{k+1}, y_k)``, and the
    result is the AMD iterate ``(zeta_{k+1}, x_{k+1})``.

    Raises:
        ConfigError: If ``system`` is not ``accelerated_dual``.
        DomainError: If ``t_tilde`` or ``delta`` is not positive.
    """
    t_tilde = validate_positive(t_tilde, "t_tilde")
    delta = validate_positive(delta, "delta")
    xi = np.asarray(state, dtype=np.float64)

    def pieces(stage: FloatArray) -> tuple[FloatArray, FloatArray, FloatArray]:
        return ark_pieces(system, t_tilde, stage)

    g1_s1, g2_s1, _ = pieces(xi)
    stage2 = xi + delta * g1_s1 + delta * g2_s1
    _, _, g3_s2 = pieces(stage2)
    stage3 = xi + delta * g1_s1 + delta * g2_s1 + delta * g3_s2
    _, g2_s3, g3_s3 = pieces(stage3)
    return xi + delta * g1_s1 + delta * g2_s3 + delta * g3_s3


# ---------------------------
# Reference integration
# ---------------------------


@dataclass(frozen=True)
class Trajectory:
    """
    A reference solution on ``[t0, t1]``.

    ``t`` and ``states`` hold the accepted integrator steps (``states`` has
    one row per step). Calling the trajectory evaluates the dense output at
    any time in the interval.
    """

    system: OdeSystem
    t: FloatArray
    states: FloatArray
    nfev: int
    _dense: OdeSolution = field(repr=False, compare=False)

    @property
    def t0(self) -> float:
        return float(self.t[0])

    @property
    def t1(self) -> float:
        return float(self.t[-1])

    @property
    def final(self) -> FloatArray:
        return self.states[-1]

    def __call__(self, t: float) -> FloatArray:
        span = self.t1 - self.t0
        slack = 1e-12 * max(1.0, abs(self.t1))
        if not (self.t0 - slack <= t <= self.t1 + slack) or span < 0:
            raise DomainError(f"t={t!r} outside the trajectory span [{self.t0}, {self.t1}]")
        return np.asarray(self._dense(min(max(t, self.t0), self.t1)), dtype=np.float64)

    def sample(self, times: Sequence[float] | FloatArray) -> FloatArray:
        """Dense values at ``times``, one row per time."""
        return np.vstack([self(float(t)) for t in times])


def integrate_reference(
    system: OdeSystem,
    t0: float,
    t1: float,
    state0: Any,
    tol: float = DEFAULT_REFERENCE_TOL,
    *,
    method: str = "DOP853",
) -> Trajectory:
    """
    Integrate ``system`` from ``(t0, state0)`` to ``t1`` with an adaptive explicit pair.

    Absolute and relative tolerances are both ``tol``.

    Raises:
        DomainError: If ``t0`` precedes ``system.t0`` or ``t1 <= t0``.
        ConfigError: For an unknown method.
        StepSizeUnderflowError: When the step size collapses.
        ConvergenceError: For any other integrator failure.
    """
    if method not in INTEGRATOR_METHODS:
        raise ConfigError(
            f"Unknown integrator {method!r}; expected one of {', '.join(INTEGRATOR_METHODS)}"
        )
    if t0 < system.start_time:
        raise DomainError(f"{system.tag} cannot start before t0={system.t0!r}, got {t0!r}")
    if not t1 > t0:
        raise DomainError(f"t1 must exceed t0, got t0={t0!r}, t1={t1!r}")
    tol = validate_positive(tol, "tol")
    y0 = np.array(state0, dtype=np.float64)
    system.split(y0)

    sol = solve_ivp(
        system.rhs,
        (float(t0), float(t1)),
        y0,
        method=method,
        rtol=tol,
        atol=tol,
        dense_output=True,
    )
    if not sol.success:
        message = str(sol.message)
        if "step size" in message.lower():
            raise StepSizeUnderflowError(
                f"{system.tag}: integrator step size underflow near t={sol.t[-1]!r} ({message})"
            )
        raise ConvergenceError(f"{system.tag}: integration failed: {message}")
    logger.debug(
        "integrated %s on [%g, %g] with %s: %d steps, %d rhs evaluations",
        system.tag,
        t0,
        t1,
        method,
        sol.t.size - 1,
        sol.nfev,
    )
    return Trajectory(
        system=system,
        t=frozen(np.asarray(sol.t, dtype=np.float64)),
        states=frozen(np.asarray(sol.y, dtype=np.float64).T),
        nfev=int(sol.nfev),
        _dense=sol.sol,
    )


# ---------------------------
# Continuous Lyapunov functions
# ---------------------------


def lyapunov_continuous(
    tag: LyapunovTag,
    system: OdeSystem,
    t: float,
    state: Any,
    x_star: Any,
    zeta_star: Any = None,
    f_star: float | None = None,
) -> float:
    """
    Evaluate a continuous Lyapunov function.

    Tags:
      - ``gf``: ``t (f(x) - f*) + D_phi(x*, x)`` for the (mirror) gradient flows.
      - ``polyak``: ``(t^2/r^2)(f(x) - f*) + 1/2 ||zeta - x*||^2`` for the
        Euclidean ``accelerated_dual`` system.
      - ``dual``: ``(t^2/r^2)(f(x) - f*) + D_psi*(zeta, zeta*)``.
      - ``primal``: ``(t^2/r^2)(f(x) - f*) + D_phi(x*, chi(zeta))``, also defined
        when x* sits on the boundary.

    ``f*`` defaults to ``f(x*)``.

    Raises:
        ConfigError: For an unknown tag.
        DomainError: If the tag does not fit the system, ``t < 0``, or ``dual``
            is requested without ``zeta_star``.
    """
    if tag not in LYAPUNOV_TAGS:
        raise ConfigError(
            f"Unknown Lyapunov tag {tag!r}; expected one of {', '.join(LYAPUNOV_TAGS)}"
        )
    if not t >= 0.0:
        raise DomainError(f"Lyapunov functions need t >= 0, got {t!r}")
    m, f = system.mirror, system.objective
    x = system.primal_position(state)
    fs = f.value(x_star) if f_star is None else f_star
    gap = f.value(x) - fs

    if tag == "gf":
        if system.accelerated:
            raise DomainError("the gf Lyapunov function belongs to the gradient flows")
        return t * gap + m.bregman_primal(x_star, x)

    if not system.accelerated:
        raise DomainError(f"the {tag} Lyapunov function needs an accelerated system")
    weight = (t * t) / (system.rate * system.rate)

    if tag == "primal":
        return weight * gap + m.bregman_primal(
            x_star, system.mirror_point(state), allow_boundary=True
        )

    head = system.split(state)[0]
    zeta = head if system.tag == "accelerated_dual" else np.asarray(m.grad_phi(head))
    if tag == "polyak":
        if m.geometry != "euclidean" or system.tag != "accelerated_dual":
            raise DomainError("the polyak Lyapunov function is the euclidean accelerated_dual case")
        diff = zeta - np.asarray(x_star, dtype=np.float64)
        return weight * gap + 0.5 * float(diff @ diff)
    if zeta_star is None:
        raise DomainError(
            "the dual Lyapunov function needs zeta*; the minimizer may lie outside the image of chi"
        )
    return weight * gap + m.bregman_dual(zeta, zeta_star)


# ---------------------------
# Consistency
# ---------------------------

DiscreteRunner = Callable[[OdeSystem, float, FloatArray, float, int], FloatArray]
"""``(system, t_start, state0, delta, n_steps) -> state after n_steps``."""


def explicit_euler_runner(
    system: OdeSystem, t_start: float, state0: FloatArray, delta: float, n_steps: int
) -> FloatArray:
    """Forward Euler on any system, used to check the order fit itself."""
    state = np.array(state0, dtype=np.float64)
    for j in range(n_steps):
        state = state + delta * system.rhs(t_start + j * delta, state)
    return state


def amd_runner(
    system: OdeSystem, t_start: float, state0: FloatArray, delta: float, n_steps: int
) -> FloatArray:
    """
    AMD with ``h = delta^2`` and ``gamma_j = (t_start + j delta) / (r delta)``.

    The coefficients grow by ``1/r`` per step, as ``linear(r)`` does, but are
    offset so that the first step sits at ``t_start`` for every ``delta``.

    Raises:
        DomainError: If ``t_start < r delta`` (``gamma`` would drop below 1).
    """
    if system.tag != "accelerated_dual":
        raise ConfigError(f"amd_runner integrates accelerated_dual, not {system.tag}")
    r = system.rate
    if t_start < r * delta * (1.0 - 1e-12):
        raise DomainError(f"t_start={t_start!r} < r*delta={r * delta!r} gives gamma < 1")
    zeta, x = system.split(state0)
    h = delta * delta
    # Only value(k) for the next step is read from the schedule; gamma is reset below.
    schedule = GammaSchedule.constant(1.0)
    s = SolverState(
        k=0, x=PrimalVec(frozen(x)), zeta=DualVec(frozen(zeta)), y=PrimalVec(frozen(x))
    )
    for j in range(n_steps):
        s = s.evolve(gamma=max(1.0, (t_start + j * delta) / (r * delta)))
        s = amd_step(s, system.mirror, system.objective, schedule, h)
    return system.join(cast(DualVec, s.zeta), s.x)


def consistency_order(
    runner: DiscreteRunner,
    system: OdeSystem,
    t0: float,
    t1: float,
    deltas: Sequence[float],
    state0: Any,
    *,
    tol: float = DEFAULT_REFERENCE_TOL,
) -> float:
    """
    Measured order of a one-step method against a reference trajectory.

    Each ``delta`` must divide ``t1 - t0``. The global error is the max-norm
    of ``state_N - state_ref(t1)`` over the whole state; the order is the
    least-squares slope of ``log2 error`` against ``log2 delta``. Errors that
    are all zero give ``inf``.

    Raises:
        DomainError: For fewer than two deltas or deltas that do not divide
            the interval.
        ConvergenceError: If the error does not decrease with ``delta``.
    """
    if len(deltas) < 2:
        raise DomainError("consistency_order needs at least two step sizes")
    span = t1 - t0
    if not span > 0:
        raise DomainError(f"t1 must exceed t0, got t0={t0!r}, t1={t1!r}")
    y0 = np.array(state0, dtype=np.float64)
    reference = integrate_reference(system, t0, t1, y0, tol).final

    errors = []
    for delta in deltas:
        delta = validate_positive(delta, "delta")
        n = round(span / delta)
        if n < 1 or abs(n * delta - span) > 1e-9 * span:
            raise DomainError(f"delta={delta!r} does not divide the interval length {span!r}")
        final = runner(system, t0, y0, delta, n)
        errors.append(float(np.max(np.abs(np.asarray(final) - reference))))
    logger.debug("consistency errors for deltas %s: %s", list(deltas), errors)

    err = np.asarray(errors)
    if np.all(err == 0.0):
        return math.inf
    err = np.maximum(err, np.finfo(np.float64).tiny)
    slope = float(np.polyfit(np.log2(np.asarray(deltas, dtype=np.float64)), np.log2(err), 1)[0])
    if not slope > 0.0:
        raise ConvergenceError(
            f"global error does not decrease with the step size (fitted order {slope:.3f})"
        )
    return slope
