"""Seeded problem instances and their optima."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np

from .._common import ConfigError, FloatArray, frozen
from .._random import SeededStream
from ..algorithms import REFERENCE_FACTOR, ReferenceOptimum, reference_optimum
from ..linops import DenseMatrix, DualVec, PrimalVec, primal
from ..mirror import MirrorMap, make_mirror
from ..objectives import Objective, PowerObjective, QuadraticObjective
from .config import ExperimentConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProblemInstance:
    """
    One objective on one feasible set, with a starting point and its optimum.

    ``zeta_star`` is None when the minimizer lies on the boundary of X (no
    dual optimum exists). ``reference`` is set when the optimum came from a
    long AMD run rather than a closed form.
    """

    mirror: MirrorMap
    objective: Objective
    x0: PrimalVec
    x_star: PrimalVec
    f_star: float
    zeta_star: DualVec | None
    reference: ReferenceOptimum | None = None
    B: DenseMatrix | None = None
    random: dict[str, Any] | None = None

    @property
    def interior(self) -> bool:
        return self.zeta_star is not None

    def provenance(self) -> dict[str, Any]:
        if self.reference is not None:
            return self.reference.provenance()
        return {"method": "closed_form", "f_star": self.f_star, "boundary_components": 0}


def random_factor(stream: SeededStream, d: int) -> DenseMatrix:
    """``d x d`` matrix of independent standard normals, filled row by row."""
    return DenseMatrix(stream.normal(d * d), rows=d, cols=d)


def random_simplex_point(stream: SeededStream, d: int) -> FloatArray:
    """Uniform ``[0, 1)`` draws rescaled to sum to one."""
    u = stream.uniform(d)
    return u / u.sum()


def power_optimum(m: MirrorMap) -> FloatArray:
    """Minimizer of the separable power objective: the barycenter on the simplex, 1/2 elsewhere."""
    if m.geometry == "simplex":
        return np.full(m.d, 1.0 / m.d)
    return np.full(m.d, 0.5)


def default_power_x0(m: MirrorMap) -> FloatArray:
    """A starting point near a vertex of X (the origin on R^d)."""
    if m.geometry == "simplex":
        x0 = np.full(m.d, 1e-3)
        x0[0] = 1.0 - 1e-3 * (m.d - 1)
        return x0
    if m.geometry == "hypercube":
        x0 = np.full(m.d, 1e-3)
        x0[0] = 0.999
        return x0
    return np.zeros(m.d)


def draw_quadratic(
    m: MirrorMap, stream: SeededStream, x0: Any = None
) -> tuple[QuadraticObjective, DenseMatrix, PrimalVec]:
    """
    Draw ``B`` and then, unless ``x0`` is given, a starting point from ``stream``.

    Raises:
        ConfigError: If ``x0`` is not feasible.
    """
    B = random_factor(stream, m.d)
    if x0 is None:
        x0 = random_simplex_point(stream, m.d) if m.geometry == "simplex" else stream.uniform(m.d)
    return QuadraticObjective(B), B, _feasible(m, x0)


def reference_step_size(m: MirrorMap, f: Objective) -> float:
    """``1 / (L_chi L_f)``, the step the reference AMD run uses."""
    return 1.0 / (m.L_chi * f.absolute_smoothness(m.primal_norm))


def build_instance(
    config: ExperimentConfig, *, show_progress: bool = False
) -> ProblemInstance:
    """
    Build the instance a config describes.

    Power objectives get their closed-form optimum. Quadratics draw ``B`` and
    (unless ``x0`` is given) ``x0`` from the seeded stream, in that order, and
    take their optimum from a reference AMD run ``10 * steps`` long.

    Raises:
        ConfigError: If the config's ``x0`` is not feasible.
    """
    m = make_mirror(config.geometry, config.d)
    stream = SeededStream(config.seed)

    if config.objective == "power":
        f: Objective = PowerObjective(config.p, config.d)
        x0 = np.asarray(config.x0) if config.x0 is not None else default_power_x0(m)
        x_star = primal(power_optimum(m))
        instance = ProblemInstance(
            mirror=m,
            objective=f,
            x0=_feasible(m, x0),
            x_star=x_star,
            f_star=f.value(x_star),
            zeta_star=m.grad_phi(x_star),
        )
        logger.debug("power instance d=%d p=%d", config.d, config.p)
        return instance

    f, B, x0 = draw_quadratic(m, stream, config.x0)

    h_ref = reference_step_size(m, f)
    ref = reference_optimum(
        m, f, x0, h_ref, max(1, REFERENCE_FACTOR * config.steps), show_progress=show_progress
    )
    interior = ref.interior and m.feasible_set.in_relative_interior(ref.x_star)
    zeta_star = m.grad_phi(ref.x_star) if interior else None
    logger.debug(
        "quadratic instance d=%d seed=%d: h_ref=%r, %d boundary components",
        config.d,
        config.seed,
        h_ref,
        len(ref.boundary),
    )
    return ProblemInstance(
        mirror=m,
        objective=f,
        x0=x0,
        x_star=ref.x_star,
        f_star=ref.f_star,
        zeta_star=zeta_star,
        reference=ref,
        B=B,
        random=stream.describe(),
    )


def _feasible(m: MirrorMap, x0: Any) -> PrimalVec:
    x = primal(x0)
    if x.shape != (m.d,) or not m.feasible_set.contains(x):
        raise ConfigError(f"x0 must be a point of the {m.geometry} in dimension {m.d}")
    return PrimalVec(frozen(np.array(x)))
