"""
The ``check`` suite: numerical invariants a working installation must satisfy.

Each check draws its data from a ``SeededStream`` and returns a
``CheckResult``; none of them raises on a failed comparison. The suite is
small enough to finish in well under a minute.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Final, cast

import numpy as np

from .._common import AMDR_EPSILON, ConfigError, FloatArray
from .._random import SeededStream
from ..algorithms import RunConfig, amd_weight, make_solver, run
from ..linops import DenseMatrix
from ..mirror import GEOMETRY_MAP, SimplexMirror, make_mirror, three_point_residual
from ..objectives import PowerObjective, QuadraticObjective
from ..ode import OdeSystem, integrate_reference, lyapunov_continuous
from ..regularizers import ShiftedEntropyRegularizer, project_simplex
from ..schedules import GammaSchedule

logger = logging.getLogger(__name__)

ROUND_TRIP_TOL: Final[float] = 1e-10
SHIFT_TOL: Final[float] = 1e-12
EQUIVALENCE_TOL: Final[float] = 1e-10
LYAPUNOV_SLACK: Final[float] = 1e-9
ODE_LYAPUNOV_SLACK: Final[float] = 1e-8
ORACLE_TOL: Final[float] = 1e-6


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _simplex_points(stream: SeededStream, n: int, d: int) -> FloatArray:
    u = stream.uniform(n * d).reshape(n, d) + 1e-3
    return u / u.sum(axis=1, keepdims=True)


# ---------------------------
# Mirror-map properties
# ---------------------------


def check_round_trip(seed: int = 0, n: int = 1000, d: int = 5) -> CheckResult:
    """``chi(grad phi(z)) == z`` on interior samples of every geometry."""
    stream = SeededStream(seed)
    worst = 0.0
    for geometry in GEOMETRY_MAP:
        m = make_mirror(geometry, d)
        if geometry == "simplex":
            points = _simplex_points(stream, n, d)
        elif geometry == "hypercube":
            points = 1e-3 + (1.0 - 2e-3) * stream.uniform(n * d).reshape(n, d)
        else:
            points = stream.normal(n * d).reshape(n, d)
        for z in points:
            worst = max(worst, float(np.max(np.abs(m.chi(m.grad_phi(z)) - z))))
    return CheckResult(
        "mirror.round_trip", worst <= ROUND_TRIP_TOL, f"max deviation {worst:.3e}"
    )


def check_normal_shift(seed: int = 0, n: int = 1000, d: int = 5) -> CheckResult:
    """Simplex: shifting a dual point along the all-ones direction leaves ``chi`` unchanged."""
    stream = SeededStream(seed)
    m = SimplexMirror(d)
    zetas = 3.0 * stream.normal(n * d).reshape(n, d)
    shifts = 20.0 * (stream.uniform(n) - 0.5)
    worst = 0.0
    for zeta, c in zip(zetas, shifts):
        worst = max(worst, float(np.max(np.abs(m.chi(zeta + c) - m.chi(zeta)))))
    return CheckResult("mirror.normal_shift", worst <= SHIFT_TOL, f"max deviation {worst:.3e}")


def check_project_normal(seed: int = 0, n: int = 200, d: int = 5) -> CheckResult:
    """Normal components are multiples of the all-ones vector on the simplex, zero elsewhere."""
    stream = SeededStream(seed)
    worst = 0.0
    for geometry in GEOMETRY_MAP:
        m = make_mirror(geometry, d)
        for zeta in stream.normal(n * d).reshape(n, d):
            v = np.asarray(m.project_normal(zeta))
            off = v - v.mean() if geometry == "simplex" else v
            worst = max(worst, float(np.max(np.abs(off))) / max(1.0, float(np.max(np.abs(zeta)))))
    return CheckResult("mirror.project_normal", worst <= 1e-12, f"max residual {worst:.3e}")


def check_three_point(seed: int = 0, n: int = 200, d: int = 5) -> CheckResult:
    stream = SeededStream(seed)
    worst = 0.0
    for geometry in GEOMETRY_MAP:
        m = make_mirror(geometry, d)
        for _ in range(n):
            xi, zeta, zeta_star = (stream.normal(d) for _ in range(3))
            worst = max(worst, abs(three_point_residual(m, xi, zeta, zeta_star)))
    return CheckResult("mirror.three_point", worst <= 1e-9, f"max residual {worst:.3e}")


# ---------------------------
# Algorithms
# ---------------------------


def check_euclidean_equivalence(
    seed: int = 0, instances: int = 20, d: int = 10, steps: int = 100
) -> CheckResult:
    """Euclidean AMD with the recurrence matches the three-term recursion."""
    stream = SeededStream(seed)
    m = make_mirror("euclidean", d)
    worst = 0.0
    for _ in range(instances):
        f = QuadraticObjective(DenseMatrix(stream.normal(d * d), rows=d, cols=d))
        x0 = stream.uniform(d)
        h = 1.0 / f.absolute_smoothness("l2")
        amd_xs = _iterates("amd", RunConfig(m, f, x0, h, steps))
        nes_xs = _iterates("nesterov", RunConfig(m, f, x0, h, steps))
        err = np.abs(amd_xs - nes_xs) / np.maximum(1.0, np.abs(nes_xs))
        worst = max(worst, float(np.max(err)))
    return CheckResult(
        "algorithms.euclidean_equivalence",
        worst <= EQUIVALENCE_TOL,
        f"max relative deviation {worst:.3e} over {instances} instances",
    )


def _iterates(tag: str, config: RunConfig) -> FloatArray:
    return np.vstack([np.asarray(s.x) for s in make_solver(tag, config).states()])


def check_amd_lyapunov(
    seed: int = 0, instances: int = 20, d: int = 10, steps: int = 200
) -> CheckResult:
    """
    AMD's dual Lyapunov sequence is nonincreasing and bounds the weighted gap.

    Quadratics are centered at a random interior point of the simplex, so the
    minimizer and its dual point are known exactly.
    """
    stream = SeededStream(seed)
    m = SimplexMirror(d)
    failures: list[str] = []
    for i in range(instances):
        center = _simplex_points(stream, 1, d)[0]
        f = QuadraticObjective(DenseMatrix(stream.normal(d * d), rows=d, cols=d), center=center)
        x0 = _simplex_points(stream, 1, d)[0]
        h = 1.0 / (m.L_chi * f.absolute_smoothness(m.primal_norm))
        for schedule in (GammaSchedule.nesterov(), GammaSchedule.linear(3.0)):
            cfg = RunConfig(m, f, x0, h, steps, schedule=schedule, x_star=center, f_star=0.0)
            trace = run("amd", cfg)
            values = [rec.lyapunov_dual for rec in trace]
            if any(v is None for v in values):
                failures.append(f"instance {i} {schedule.describe()}: dual Lyapunov undefined")
                continue
            dual_values = cast(list[float], values)
            v0 = dual_values[0]
            slack = LYAPUNOV_SLACK * v0
            for rec, prev, cur in zip(trace[1:], dual_values, dual_values[1:]):
                if cur > prev + slack:
                    failures.append(f"instance {i} {schedule.describe()}: V rises at k={rec.k}")
                    break
                if amd_weight(schedule, rec.k, h) * rec.f_gap > v0 + slack:
                    failures.append(f"instance {i} {schedule.describe()}: rate bound at k={rec.k}")
                    break
    detail = "; ".join(failures[:3]) or f"{instances} instances, two schedules"
    return CheckResult("algorithms.amd_lyapunov", not failures, detail)


def projected_gradient_argmin(
    reg: ShiftedEntropyRegularizer, g: FloatArray, y: FloatArray, tau: float, iters: int = 5000
) -> FloatArray:
    """
    Brute-force ``argmin_{x in simplex} tau <g, x> + R(x, y)`` by projected gradient.

    The Hessian of ``R`` is bounded by ``1 / eps``, so ``eps`` is a safe step.
    """
    eps = reg.eps
    x = project_simplex(y)
    for _ in range(iters):
        grad = tau * g + np.log((x + eps) / (y + eps))
        nxt = project_simplex(x - eps * grad)
        if np.max(np.abs(nxt - x)) < 1e-15:
            return nxt
        x = nxt
    return x


def check_argmin_oracle(seed: int = 0, instances: int = 50) -> CheckResult:
    """The threshold-bisection argmin matches the projected-gradient oracle."""
    stream = SeededStream(seed)
    reg = ShiftedEntropyRegularizer(AMDR_EPSILON)
    worst = 0.0
    for i in range(instances):
        d = 2 + i % 4
        m = SimplexMirror(d)
        g = stream.normal(d)
        y = _simplex_points(stream, 1, d)[0]
        tau = 0.1 + 2.0 * float(stream.uniform(1)[0])
        got = np.asarray(reg.argmin(m, g, y, tau))
        want = projected_gradient_argmin(reg, g, y, tau)
        worst = max(worst, float(np.max(np.abs(got - want))))
    return CheckResult(
        "regularizers.argmin_oracle", worst <= ORACLE_TOL, f"max deviation {worst:.3e}"
    )


# ---------------------------
# ODE
# ---------------------------


def check_ode_lyapunov(t1: float = 20.0, samples: int = 400) -> CheckResult:
    """
    Both continuous Lyapunov functions decrease along the accelerated flow
    (``r = 2``) on the two-dimensional power objective.
    """
    m = SimplexMirror(2)
    f = PowerObjective(10, 2)
    system = OdeSystem.accelerated_dual(m, f, r=2.0)
    x_star = np.array([0.5, 0.5])
    zeta_star = m.grad_phi(x_star)
    traj = integrate_reference(
        system, system.start_time, t1, system.initial_state([0.999, 0.001]), tol=1e-10
    )
    times = np.linspace(traj.t0, traj.t1, samples)
    failures = []
    for tag in ("dual", "primal"):
        values = [
            lyapunov_continuous(tag, system, float(t), traj(float(t)), x_star, zeta_star, 0.0)
            for t in times
        ]
        rise = max(b - a for a, b in zip(values, values[1:]))
        if rise > ODE_LYAPUNOV_SLACK:
            failures.append(f"{tag} rises by {rise:.3e}")
    return CheckResult(
        "ode.lyapunov", not failures, "; ".join(failures) or f"{samples} samples on [t0, {t1}]"
    )


CHECKS: Final[dict[str, Callable[[int], CheckResult]]] = {
    "round_trip": lambda seed: check_round_trip(seed),
    "normal_shift": lambda seed: check_normal_shift(seed),
    "project_normal": lambda seed: check_project_normal(seed),
    "three_point": lambda seed: check_three_point(seed),
    "euclidean_equivalence": lambda seed: check_euclidean_equivalence(seed),
    "amd_lyapunov": lambda seed: check_amd_lyapunov(seed),
    "argmin_oracle": lambda seed: check_argmin_oracle(seed),
    "ode_lyapunov": lambda seed: check_ode_lyapunov(),
}


def run_checks(names: Sequence[str] | None = None, seed: int = 0) -> list[CheckResult]:
    """
    Run the named checks (all of them by default) in registry order.

    Raises:
        ConfigError: For an unknown check name.
    """
    selected = list(CHECKS) if not names else list(names)
    unknown = [n for n in selected if n not in CHECKS]
    if unknown:
        raise ConfigError(f"Unknown checks: {', '.join(unknown)}")
    results = []
    for name in selected:
        result = CHECKS[name](seed)
        logger.info("%s: %s (%s)", result.name, "ok" if result.passed else "FAILED", result.detail)
        results.append(result)
    return results
