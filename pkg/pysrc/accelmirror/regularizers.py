"""
Regularizers for the AMDR argmin step.

Step 3 of AMDR solves ``argmin_{x in X} tau <g, x> + R(x, y)``. Two
regularizers ship: the half squared Euclidean distance, and the shifted
entropy ``R(x, y) = sum (x_i + eps) log((x_i + eps) / (y_i + eps))`` on the
simplex, whose minimizer has a one-parameter threshold form found by bisection.
"""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from typing import Any, ClassVar

import numpy as np
from scipy.optimize import bisect
from scipy.special import kl_div

from ._common import (
    AMDR_EPSILON,
    BISECTION_TOL,
    ConfigError,
    ConvergenceError,
    DimensionError,
    DomainError,
    FloatArray,
    frozen,
    validate_positive,
)
from .linops import PrimalVec
from .mirror import MirrorMap

logger = logging.getLogger(__name__)

_BISECTION_MAX_ITERS = 400


def project_simplex(v: Any) -> FloatArray:
    """
    Euclidean projection of ``v`` onto the probability simplex.

    Sort-based threshold: with ``u`` sorted descending, ``rho`` is the last
    index where ``u_j - (sum_{i<=j} u_i - 1) / j > 0``.
    """
    arr = np.asarray(v, dtype=np.float64)
    u = np.sort(arr)[::-1]
    cssv = np.cumsum(u) - 1.0
    ind = np.arange(1, arr.shape[0] + 1)
    rho = int(np.count_nonzero(u - cssv / ind > 0))
    theta = cssv[rho - 1] / rho
    return np.maximum(arr - theta, 0.0)


class Regularizer(ABC):
    """
    A divergence-like ``R(x, y)`` sandwiched between two quadratics:
    ``(l_R / 2)||x - y||^2 <= R(x, y) <= (L_R / 2)||x - y||^2``.
    """

    __slots__ = ()

    kind: ClassVar[str]

    @abstractmethod
    def value(self, x: Any, y: Any) -> float:
        """R(x, y)."""

    @abstractmethod
    def lower_bound(self, d: int) -> float:
        """l_R for dimension d."""

    @abstractmethod
    def upper_bound(self, d: int) -> float:
        """L_R for dimension d."""

    @abstractmethod
    def _argmin(self, m: MirrorMap, g: FloatArray, y: FloatArray, tau: float) -> FloatArray:
        """Minimizer over X of ``tau <g, x> + R(x, y)``."""

    def argmin(self, m: MirrorMap, g: Any, y: Any, tau: float) -> PrimalVec:
        """
        ``argmin_{x in X} tau <g, x> + R(x, y)``.

        Raises:
            DimensionError: If ``g`` or ``y`` have the wrong length.
            DomainError: If ``tau <= 0`` or the geometry is not supported.
            ConvergenceError: If the inner solver fails.
        """
        gg = np.asarray(g, dtype=np.float64)
        yy = np.asarray(y, dtype=np.float64)
        if gg.shape != (m.d,) or yy.shape != (m.d,):
            raise DimensionError(
                f"argmin expects vectors of length {m.d}, got {gg.shape} and {yy.shape}"
            )
        tau = validate_positive(tau, "tau")
        return PrimalVec(frozen(self._argmin(m, gg, yy, tau)))

    def describe(self) -> str:
        return self.kind


class EuclideanRegularizer(Regularizer):
    """
    ``R(x, y) = 1/2 ||x - y||_2^2`` with ``l_R = L_R = 1``.

    The argmin is ``y - tau g`` followed by the Euclidean projection onto X
    (identity on R^d, clipping on the hypercube, sort-based on the simplex).
    """

    __slots__ = ()

    kind: ClassVar[str] = "euclidean"

    def value(self, x: Any, y: Any) -> float:
        diff = np.asarray(x, dtype=np.float64) - np.asarray(y, dtype=np.float64)
        return 0.5 * float(diff @ diff)

    def lower_bound(self, d: int) -> float:
        return 1.0

    def upper_bound(self, d: int) -> float:
        return 1.0

    def _argmin(self, m: MirrorMap, g: FloatArray, y: FloatArray, tau: float) -> FloatArray:
        step = y - tau * g
        if m.geometry == "simplex":
            return project_simplex(step)
        if m.geometry == "hypercube":
            return np.clip(step, 0.0, 1.0)
        return step


class ShiftedEntropyRegularizer(Regularizer):
    """
    Shifted entropy ``R(x, y) = sum (x_i + eps) log((x_i + eps) / (y_i + eps))``
    on the simplex.

    The value is computed in Bregman form (adding ``-(x_i - y_i)``, which sums
    to zero on the simplex) so it stays nonnegative for any nonnegative input.
    With respect to l1, ``l_R = 1 / (1 + d eps)`` (Pinsker on the shifted,
    renormalized measures) and ``L_R = 1 / eps`` (Hessian entries
    ``1 / (x_i + eps) <= 1 / eps``).

    Raises:
        ConfigError: If ``eps`` is not positive.
    """

    __slots__ = ("_eps",)

    kind: ClassVar[str] = "shifted_entropy"

    def __init__(self, eps: float = AMDR_EPSILON):
        if not math.isfinite(eps) or eps <= 0.0:
            raise ConfigError(f"shifted entropy needs eps > 0, got {eps!r}")
        self._eps = float(eps)

    @property
    def eps(self) -> float:
        return self._eps

    def describe(self) -> str:
        return f"{self.kind}:{self._eps!r}"

    def value(self, x: Any, y: Any) -> float:
        xx = np.asarray(x, dtype=np.float64) + self._eps
        yy = np.asarray(y, dtype=np.float64) + self._eps
        return float(np.sum(kl_div(xx, yy)))

    def lower_bound(self, d: int) -> float:
        return 1.0 / (1.0 + d * self._eps)

    def upper_bound(self, d: int) -> float:
        return 1.0 / self._eps

    def _argmin(self, m: MirrorMap, g: FloatArray, y: FloatArray, tau: float) -> FloatArray:
        if m.geometry != "simplex":
            raise DomainError(
                f"shifted entropy argmin is implemented for the simplex, not {m.geometry}"
            )
        if np.any(y < -1e-12):
            raise DomainError("y must have nonnegative entries")
        eps = self._eps
        # KKT: x_i = max(0, exp(a_i - nu) - eps), sum x_i = 1, decreasing in nu.
        a = np.log(np.clip(y, 0.0, None) + eps) - tau * g
        a_max = float(np.max(a))

        def excess(nu: float) -> float:
            return float(np.sum(np.maximum(0.0, np.exp(a - nu) - eps))) - 1.0

        nu_lo = a_max - math.log1p(eps)
        nu_hi = a_max - math.log(eps)
        f_lo, f_hi = excess(nu_lo), excess(nu_hi)
        if not (f_lo >= 0.0 and f_hi <= 0.0):
            raise ConvergenceError(
                f"threshold bisection failed to bracket a root (excess {f_lo!r}, {f_hi!r})"
            )
        if f_lo == 0.0:
            nu = nu_lo
        else:
            try:
                nu = bisect(
                    excess,
                    nu_lo,
                    nu_hi,
                    xtol=BISECTION_TOL * 1e-2,
                    maxiter=_BISECTION_MAX_ITERS,
                )
            except RuntimeError as exc:
                raise ConvergenceError(f"threshold bisection did not converge: {exc}") from exc
        x = np.maximum(0.0, np.exp(a - nu) - eps)
        residual = abs(float(x.sum()) - 1.0)
        if residual > BISECTION_TOL * 1e3:
            raise ConvergenceError(f"threshold bisection left sum residual {residual!r}")
        logger.debug("shifted-entropy argmin: nu=%r residual=%.3e", nu, residual)
        return x


REGULARIZER_MAP: dict[str, type[Regularizer]] = {
    "euclidean": EuclideanRegularizer,
    "shifted_entropy": ShiftedEntropyRegularizer,
}


def default_regularizer(m: MirrorMap, eps: float = AMDR_EPSILON) -> Regularizer:
    """Shifted entropy on the simplex, the Euclidean distance elsewhere."""
    if m.geometry == "simplex":
        return ShiftedEntropyRegularizer(eps)
    return EuclideanRegularizer()


def regularized_argmin(
    reg: Regularizer, m: MirrorMap, g: Any, y: Any, tau: float
) -> PrimalVec:
    """Functional form of ``reg.argmin``."""
    return reg.argmin(m, g, y, tau)
