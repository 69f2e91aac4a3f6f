"""
Objective functions with gradients and smoothness constants.

Two families are shipped, the (optionally centered) quadratic
``1/2 (x - c)^T B^T B (x - c)`` and the separable p-power
``(1/p) sum (x_i - 1/2)^p``, plus a wrapper for user-supplied callables.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from collections.abc import Callable
from typing import Any

import numpy as np

from ._common import (
    ConfigError,
    DimensionError,
    DomainError,
    FloatArray,
    NormKind,
    frozen,
)
from .linops import (
    DenseMatrix,
    DualVec,
    PrimalVec,
    max_abs_entry,
    spectral_radius,
)

logger = logging.getLogger(__name__)


class Objective(ABC):
    """
    A differentiable convex function on the feasible set.

    Subclasses implement ``_value`` and ``_gradient`` on validated arrays and
    may override ``absolute_smoothness``. ``eval_grad`` returns both at once.
    """

    __slots__ = ("_d",)

    def __init__(self, d: int):
        if isinstance(d, bool) or not isinstance(d, (int, np.integer)) or d < 1:
            raise DimensionError(f"dimension must be a positive integer, got {d!r}")
        self._d = int(d)

    @abstractmethod
    def _value(self, x: FloatArray) -> float:
        """f(x) on a validated array."""

    @abstractmethod
    def _gradient(self, x: FloatArray) -> FloatArray:
        """grad f(x) on a validated array."""

    @property
    def d(self) -> int:
        return self._d

    @property
    def has_absolute_smoothness(self) -> bool:
        return True

    def _checked(self, x: Any) -> FloatArray:
        arr = np.asarray(x, dtype=np.float64)
        if arr.shape != (self._d,):
            raise DimensionError(
                f"objective expects a vector of length {self._d}, got shape {arr.shape}"
            )
        return arr

    def value(self, x: Any) -> float:
        return self._value(self._checked(x))

    def gradient(self, x: Any) -> DualVec:
        return DualVec(frozen(self._gradient(self._checked(x))))

    def eval_grad(self, x: Any) -> tuple[float, DualVec]:
        arr = self._checked(x)
        return self._value(arr), DualVec(frozen(self._gradient(arr)))

    def absolute_smoothness(self, primal_norm: NormKind = "l1") -> float:
        """
        Lipschitz constant of the gradient for the given primal norm.

        Raises:
            ConfigError: If the objective carries no such constant.
        """
        raise ConfigError(
            f"{type(self).__name__} has no absolute smoothness constant; "
            "pass an explicit step size"
        )


class QuadraticObjective(Objective):
    """
    ``f(x) = 1/2 (x - c)^T G (x - c)`` with ``G = B^T B``.

    The center ``c`` defaults to the origin, which gives the objective
    ``1/2 x^T B^T B x``. A nonzero center manufactures instances whose
    minimizer over the simplex is a known interior point.

    Args:
        B: Factor matrix; only its Gram matrix is kept.
        center: Optional center ``c`` of length ``B.cols``.

    Example:
        ```python
        q = QuadraticObjective(DenseMatrix.identity(2))
        q.eval_grad([1.0, 0.0])  # (0.5, [1.0, 0.0])
        ```
    """

    __slots__ = ("_B", "_G", "_center")

    def __init__(self, B: DenseMatrix, center: Any = None):
        super().__init__(B.cols)
        self._B: DenseMatrix | None = B
        self._G = B.gram()
        self._center = self._make_center(center)

    @classmethod
    def from_gram(cls, G: DenseMatrix, center: Any = None) -> QuadraticObjective:
        """
        Build directly from a symmetric positive semidefinite ``G``.

        Raises:
            DomainError: If ``G`` is not symmetric.
        """
        if not G.is_symmetric():
            raise DomainError("Gram matrix must be symmetric")
        obj = cls.__new__(cls)
        Objective.__init__(obj, G.cols)
        obj._B = None
        obj._G = G
        obj._center = obj._make_center(center)
        return obj

    def _make_center(self, center: Any) -> FloatArray | None:
        if center is None:
            return None
        c = self._checked(center).copy()
        if not np.all(np.isfinite(c)):
            raise DomainError("center must have finite entries")
        return frozen(c)

    @property
    def B(self) -> DenseMatrix | None:
        return self._B

    @property
    def G(self) -> DenseMatrix:
        return self._G

    @property
    def center(self) -> FloatArray | None:
        return self._center

    def _shift(self, x: FloatArray) -> FloatArray:
        return x if self._center is None else x - self._center

    def _value(self, x: FloatArray) -> float:
        u = self._shift(x)
        return 0.5 * float(u @ (self._G.array @ u))

    def _gradient(self, x: FloatArray) -> FloatArray:
        return self._G.array @ self._shift(x)

    def absolute_smoothness(self, primal_norm: NormKind = "l1") -> float:
        """
        ``L_f`` for the quadratic.

        For the l1 primal norm (dual linf) this is the largest absolute entry
        of G; for l2 it is the spectral radius of G.

        Raises:
            DomainError: For the linf primal norm, which no shipped geometry uses.
        """
        if primal_norm == "l1":
            return max_abs_entry(self._G)
        if primal_norm == "l2":
            return spectral_radius(self._G)
        raise DomainError(f"absolute smoothness for primal norm {primal_norm!r} is not supported")

    def relative_smoothness(self, z: Any) -> float:
        """
        Spectral radius of ``D(z)^{1/2} G D(z)^{1/2}`` for a simplex point ``z``.

        Zero components of ``z`` are allowed; they remove the matching rows and
        columns.

        Raises:
            DomainError: If ``z`` has negative entries.
            ConvergenceError: If power iteration fails.
        """
        zz = self._checked(z)
        if np.any(zz < -1e-12):
            raise DomainError("relative smoothness needs a point with nonnegative entries")
        s = np.sqrt(np.clip(zz, 0.0, None))
        M = s[:, None] * self._G.array * s[None, :]
        return spectral_radius(DenseMatrix(0.5 * (M + M.T)))

    def __repr__(self) -> str:
        centered = self._center is not None
        return f"QuadraticObjective(d={self._d}, centered={centered})"


class PowerObjective(Objective):
    """
    Separable even power ``f(x) = (1/p) sum_i (x_i - 1/2)^p``.

    The gradient is ``(x_i - 1/2)^(p - 1)``. No absolute smoothness constant is
    attached, so automatic step-size policies refuse this objective.

    Raises:
        DomainError: If ``p`` is not an even positive integer.
    """

    __slots__ = ("_p",)

    def __init__(self, p: int = 10, d: int = 2):
        if isinstance(p, bool) or not isinstance(p, (int, np.integer)) or p < 2 or p % 2:
            raise DomainError(f"p must be an even integer >= 2, got {p!r}")
        super().__init__(d)
        self._p = int(p)

    @property
    def p(self) -> int:
        return self._p

    @property
    def has_absolute_smoothness(self) -> bool:
        return False

    def _value(self, x: FloatArray) -> float:
        return float(np.sum((x - 0.5) ** self._p)) / self._p

    def _gradient(self, x: FloatArray) -> FloatArray:
        return (x - 0.5) ** (self._p - 1)

    def __repr__(self) -> str:
        return f"PowerObjective(p={self._p}, d={self._d})"


class FunctionObjective(Objective):
    """
    Objective built from user-supplied callables.

    Args:
        d: Dimension.
        value: ``x -> f(x)``.
        gradient: ``x -> grad f(x)``.
        L_f: Optional absolute smoothness constant, keyed by nothing: it is
            returned for every primal norm.
    """

    __slots__ = ("_L_f", "_grad_fn", "_value_fn")

    def __init__(
        self,
        d: int,
        value: Callable[[FloatArray], float],
        gradient: Callable[[FloatArray], Any],
        L_f: float | None = None,
    ):
        super().__init__(d)
        self._value_fn = value
        self._grad_fn = gradient
        self._L_f = L_f

    @property
    def has_absolute_smoothness(self) -> bool:
        return self._L_f is not None

    def _value(self, x: FloatArray) -> float:
        return float(self._value_fn(x))

    def _gradient(self, x: FloatArray) -> FloatArray:
        g = np.array(self._grad_fn(x), dtype=np.float64)
        if g.shape != (self._d,):
            raise DimensionError(
                f"gradient callable returned shape {g.shape}, expected ({self._d},)"
            )
        return g

    def absolute_smoothness(self, primal_norm: NormKind = "l1") -> float:
        if self._L_f is None:
            return super().absolute_smoothness(primal_norm)
        return float(self._L_f)


def quadratic_eval_grad(q: QuadraticObjective, x: PrimalVec | Any) -> tuple[float, DualVec]:
    """``(1/2 x^T G x, G x)``, shifted by the center when one is set."""
    return q.eval_grad(x)


def power_eval_grad(p: int, x: PrimalVec | Any) -> tuple[float, DualVec]:
    """
    Value and gradient of the p-power objective on a 2-vector.

    Raises:
        DomainError: If ``p`` is odd.
    """
    return PowerObjective(p).eval_grad(x)


def absolute_smoothness(q: QuadraticObjective, primal_norm: NormKind = "l1") -> float:
    return q.absolute_smoothness(primal_norm)


def relative_smoothness(q: QuadraticObjective, z: PrimalVec | Any) -> float:
    return q.relative_smoothness(z)


def finite_difference_gradient(
    objective: Objective, x: Any, step: float = 1e-6
) -> FloatArray:
    """Centered finite differences of ``objective.value`` at ``x``, one coordinate at a time."""
    base = np.array(x, dtype=np.float64)
    out = np.empty_like(base)
    for i in range(base.shape[0]):
        e = np.zeros_like(base)
        e[i] = step
        out[i] = (objective.value(base + e) - objective.value(base - e)) / (2.0 * step)
    return out
