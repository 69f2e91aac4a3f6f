"""
Mirror-map geometries.

A mirror map bundles, for one feasible set X, the map ``chi = grad psi*`` from
the dual space onto the relative interior of X, the primal gradient
``grad phi`` that inverts it up to the normal space, both Bregman divergences
and the smoothness constant ``L_chi``. Three geometries ship: the identity on
R^d, softmax on the probability simplex, and the componentwise sigmoid on the
unit hypercube.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, ClassVar

import numpy as np
from scipy.special import expit, kl_div, log_expit, log_softmax, logit, logsumexp, softmax

from ._common import (
    INTERIOR_FLOOR,
    REPORT_CLAMP_TOL,
    SIMPLEX_SUM_TOL,
    DimensionError,
    DomainError,
    FloatArray,
    Geometry,
    NormKind,
    dual_norm,
    frozen,
    validate_geometry,
)
from .linops import DualVec, PrimalVec, pairing

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FeasibleSet:
    """
    The closed convex set X of one geometry in dimension d.

    ``contains`` tests membership of the closed set (with a small tolerance);
    ``in_relative_interior`` additionally requires every bounded coordinate to
    stay at least ``INTERIOR_FLOOR`` away from the boundary.
    """

    geometry: Geometry
    d: int

    def contains(self, x: Any, tol: float = REPORT_CLAMP_TOL) -> bool:
        arr = np.asarray(x, dtype=np.float64)
        if arr.shape != (self.d,) or not np.all(np.isfinite(arr)):
            return False
        if self.geometry == "simplex":
            return bool(np.all(arr >= -tol) and abs(arr.sum() - 1.0) <= SIMPLEX_SUM_TOL)
        if self.geometry == "hypercube":
            return bool(np.all(arr >= -tol) and np.all(arr <= 1.0 + tol))
        return True

    def in_relative_interior(self, x: Any) -> bool:
        arr = np.asarray(x, dtype=np.float64)
        if not self.contains(arr, tol=0.0):
            return False
        if self.geometry == "simplex":
            return bool(np.all(arr > INTERIOR_FLOOR))
        if self.geometry == "hypercube":
            return bool(np.all(arr > INTERIOR_FLOOR) and np.all(1.0 - arr > INTERIOR_FLOOR))
        return True

    def clamp_for_report(self, x: Any) -> FloatArray:
        """Zero out entries in ``[-1e-12, 0)``; used only when reporting iterates."""
        arr = np.array(x, dtype=np.float64)
        if self.geometry != "euclidean":
            arr[(arr < 0.0) & (arr >= -REPORT_CLAMP_TOL)] = 0.0
        if self.geometry == "hypercube":
            arr[(arr > 1.0) & (arr <= 1.0 + REPORT_CLAMP_TOL)] = 1.0
        return arr


class MirrorMap(ABC):
    """
    Shared logic for the shipped mirror maps.

    Concrete subclasses set the class attributes ``geometry``, ``primal_norm``
    and ``L_chi`` and implement the array-level hooks:
      - _chi(zeta)
      - _grad_phi(z)
      - _psi_star(zeta)
      - _dual_divergence(xi, zeta)
      - _primal_divergence(x, z)
      - _normal_component(zeta)
      - _chi_prime_action(z, v)

    Public methods validate lengths and domains, then call the hooks. Results
    are read-only arrays.
    """

    __slots__ = ("_d", "_set")

    geometry: ClassVar[Geometry]
    primal_norm: ClassVar[NormKind]
    L_chi: ClassVar[float]

    # ---- Required hooks for subclasses ----

    @abstractmethod
    def _chi(self, zeta: FloatArray) -> FloatArray:
        """Evaluate chi on a validated dual array."""

    @abstractmethod
    def _grad_phi(self, z: FloatArray) -> FloatArray:
        """Evaluate grad phi on a relative-interior primal array."""

    @abstractmethod
    def _psi_star(self, zeta: FloatArray) -> float:
        """Evaluate the conjugate potential psi*."""

    @abstractmethod
    def _dual_divergence(self, xi: FloatArray, zeta: FloatArray) -> float:
        """Bregman divergence of psi* between two dual arrays."""

    @abstractmethod
    def _primal_divergence(self, x: FloatArray, z: FloatArray) -> float:
        """Bregman divergence of phi, x in X and z in the relative interior."""

    @abstractmethod
    def _normal_component(self, zeta: FloatArray) -> FloatArray:
        """``grad phi(chi(zeta)) - zeta`` evaluated without leaving log space."""

    @abstractmethod
    def _chi_prime_action(self, z: FloatArray, v: FloatArray) -> FloatArray:
        """Jacobian action ``chi'(grad phi(z)) v``."""

    # ---- Initialization ----

    def __init__(self, d: int):
        if isinstance(d, bool) or not isinstance(d, (int, np.integer)) or d < 1:
            raise DimensionError(f"dimension must be a positive integer, got {d!r}")
        self._d = int(d)
        self._set = FeasibleSet(self.geometry, self._d)

    # ---- Properties ----

    @property
    def d(self) -> int:
        return self._d

    @property
    def dual_norm(self) -> NormKind:
        return dual_norm(self.primal_norm)

    @property
    def normal_space_dim(self) -> int:
        """Dimension of the normal space of X (vectors vanishing on its directions)."""
        return 0

    @property
    def feasible_set(self) -> FeasibleSet:
        return self._set

    # ---- Validation helpers ----

    def _vector(self, values: Any, name: str) -> FloatArray:
        arr = np.asarray(values, dtype=np.float64)
        if arr.shape != (self._d,):
            raise DimensionError(
                f"{name} must have length {self._d}, got shape {arr.shape}"
            )
        return arr

    def _interior(self, values: Any, name: str) -> FloatArray:
        arr = self._vector(values, name)
        if not self._set.in_relative_interior(arr):
            raise DomainError(
                f"{name} must lie in the relative interior of the {self.geometry}"
            )
        return arr

    def _closed(
        self, values: Any, name: str, tol: float = REPORT_CLAMP_TOL
    ) -> FloatArray:
        arr = self._vector(values, name)
        if not self._set.contains(arr, tol):
            raise DomainError(f"{name} must lie in the {self.geometry} feasible set")
        return self._set.clamp_for_report(arr)

    # ---- Public operations ----

    def chi(self, zeta: Any) -> PrimalVec:
        """
        The mirror map ``chi = grad psi*``.

        Overflow-safe for arbitrarily large dual entries; the result lies in the
        relative interior of X unless a component underflows in double precision.

        Raises:
            DimensionError: If ``len(zeta) != d``.
        """
        return PrimalVec(frozen(self._chi(self._vector(zeta, "zeta"))))

    def grad_phi(self, z: Any) -> DualVec:
        """
        The primal gradient ``grad phi``, a right inverse of ``chi``.

        Raises:
            DomainError: If ``z`` is not in the relative interior.
        """
        return DualVec(frozen(self._grad_phi(self._interior(z, "z"))))

    def psi_star(self, zeta: Any) -> float:
        return self._psi_star(self._vector(zeta, "zeta"))

    def bregman_dual(self, xi: Any, zeta: Any) -> float:
        """
        ``D_psi*(xi, zeta) = psi*(xi) - psi*(zeta) - <xi - zeta, chi(zeta)>``.

        Always nonnegative; roundoff below zero is clipped.
        """
        a = self._vector(xi, "xi")
        b = self._vector(zeta, "zeta")
        return max(0.0, self._dual_divergence(a, b))

    def bregman_primal(self, x: Any, z: Any, *, allow_boundary: bool = False) -> float:
        """
        ``D_phi(x, z)`` with ``0 log 0 = 0``, so ``x`` may lie on the boundary.

        With ``allow_boundary`` the second point may sit on the boundary too
        (monitors use this once a component of ``chi(zeta_k)`` underflows);
        the result is ``inf`` if ``x`` charges a coordinate where ``z`` vanishes.

        Raises:
            DomainError: If ``x`` is outside X or ``z`` is not interior.
        """
        a = self._closed(x, "x")
        b = self._closed(z, "z") if allow_boundary else self._interior(z, "z")
        return max(0.0, self._primal_divergence(a, b))

    def project_normal(self, zeta: Any) -> DualVec:
        """``grad phi(chi(zeta)) - zeta``, an element of the normal space."""
        return DualVec(frozen(self._normal_component(self._vector(zeta, "zeta"))))

    def initial_dual(self, x0: Any) -> DualVec:
        """
        A dual point with ``chi(zeta0) = x0``; the canonical choice ``grad phi(x0)``.

        Raises:
            DomainError: If ``x0`` is on the boundary.
        """
        return self.grad_phi(x0)

    def chi_prime_action(
        self, z: Any, v: Any, *, tol: float = REPORT_CLAMP_TOL
    ) -> FloatArray:
        """
        Apply the Jacobian ``chi'(grad phi(z))`` to a dual direction ``v``.

        Boundary points of X are accepted; the action there is the continuous
        extension of the interior formula.

        Args:
            z: Primal point in X.
            v: Dual direction.
            tol: How far below zero (or above one) a component may stray.

        Raises:
            DomainError: If ``z`` lies outside X by more than ``tol``.
        """
        zz = self._closed(z, "z", tol)
        vv = self._vector(v, "v")
        return self._chi_prime_action(zz, vv)

    # ---- Dunder ----

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MirrorMap):
            return NotImplemented
        return type(self) is type(other) and self._d == other._d

    def __hash__(self) -> int:
        return hash((type(self).__name__, self._d))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(d={self._d})"


class EuclideanMirror(MirrorMap):
    """Identity mirror map on R^d; ``psi* = phi = 1/2 ||.||_2^2``."""

    __slots__ = ()

    geometry: ClassVar[Geometry] = "euclidean"
    primal_norm: ClassVar[NormKind] = "l2"
    L_chi: ClassVar[float] = 1.0

    def _chi(self, zeta: FloatArray) -> FloatArray:
        return np.array(zeta, dtype=np.float64)

    def _grad_phi(self, z: FloatArray) -> FloatArray:
        return np.array(z, dtype=np.float64)

    def _psi_star(self, zeta: FloatArray) -> float:
        return 0.5 * float(zeta @ zeta)

    def _dual_divergence(self, xi: FloatArray, zeta: FloatArray) -> float:
        diff = xi - zeta
        return 0.5 * float(diff @ diff)

    def _primal_divergence(self, x: FloatArray, z: FloatArray) -> float:
        diff = x - z
        return 0.5 * float(diff @ diff)

    def _normal_component(self, zeta: FloatArray) -> FloatArray:
        return np.zeros(self._d)

    def _chi_prime_action(self, z: FloatArray, v: FloatArray) -> FloatArray:
        return np.array(v, dtype=np.float64)


class SimplexMirror(MirrorMap):
    """
    Entropic mirror map on the probability simplex.

    ``chi`` is the softmax, ``psi*`` is log-sum-exp and ``phi`` is the negative
    entropy ``sum x_i log x_i``, whose Bregman divergence is the
    Kullback-Leibler divergence. The normal space is spanned by the all-ones
    vector, so ``chi(zeta + c 1) = chi(zeta)``. With the l1/linf pairing,
    ``L_chi = 1``.

    Example:
        ```python
        m = SimplexMirror(3)
        m.chi([0.0, 0.0, 0.0])  # [1/3, 1/3, 1/3]
        ```
    """

    __slots__ = ()

    geometry: ClassVar[Geometry] = "simplex"
    primal_norm: ClassVar[NormKind] = "l1"
    L_chi: ClassVar[float] = 1.0

    @property
    def normal_space_dim(self) -> int:
        return 1

    def _chi(self, zeta: FloatArray) -> FloatArray:
        return softmax(zeta)

    def _grad_phi(self, z: FloatArray) -> FloatArray:
        return 1.0 + np.log(z)

    def _psi_star(self, zeta: FloatArray) -> float:
        return float(logsumexp(zeta))

    def _dual_divergence(self, xi: FloatArray, zeta: FloatArray) -> float:
        # Equals KL(chi(zeta) || chi(xi)); the log-space form avoids cancelling
        # two large log-sum-exp values when zeta grows with k.
        log_p = log_softmax(zeta)
        log_q = log_softmax(xi)
        p = np.exp(log_p)
        return float(np.sum(p * (log_p - log_q)))

    def _primal_divergence(self, x: FloatArray, z: FloatArray) -> float:
        return float(np.sum(kl_div(x, z)))

    def _normal_component(self, zeta: FloatArray) -> FloatArray:
        return 1.0 + log_softmax(zeta) - zeta

    def _chi_prime_action(self, z: FloatArray, v: FloatArray) -> FloatArray:
        return z * (v - float(v @ z))


class HypercubeMirror(MirrorMap):
    """
    Bit-entropy mirror map on the unit hypercube ``[0, 1]^d``.

    ``chi`` is the componentwise logistic sigmoid,
    ``psi*(zeta) = sum log(1 + e^zeta_i)`` and
    ``phi(x) = sum x_i log x_i + (1 - x_i) log(1 - x_i)``. ``chi'`` is diagonal
    with entries at most 1/4, so ``L_chi = 1/4`` for any l_p pairing; we use l2.
    """

    __slots__ = ()

    geometry: ClassVar[Geometry] = "hypercube"
    primal_norm: ClassVar[NormKind] = "l2"
    L_chi: ClassVar[float] = 0.25

    def _chi(self, zeta: FloatArray) -> FloatArray:
        return expit(zeta)

    def _grad_phi(self, z: FloatArray) -> FloatArray:
        return logit(z)

    def _psi_star(self, zeta: FloatArray) -> float:
        return float(np.sum(np.logaddexp(0.0, zeta)))

    def _dual_divergence(self, xi: FloatArray, zeta: FloatArray) -> float:
        # Sum of Bernoulli KL(chi(zeta)_i || chi(xi)_i) in log space.
        log_p, log_1mp = log_expit(zeta), log_expit(-zeta)
        log_q, log_1mq = log_expit(xi), log_expit(-xi)
        p, one_minus_p = np.exp(log_p), np.exp(log_1mp)
        return float(np.sum(p * (log_p - log_q) + one_minus_p * (log_1mp - log_1mq)))

    def _primal_divergence(self, x: FloatArray, z: FloatArray) -> float:
        return float(np.sum(kl_div(x, z) + kl_div(1.0 - x, 1.0 - z)))

    def _normal_component(self, zeta: FloatArray) -> FloatArray:
        return log_expit(zeta) - log_expit(-zeta) - zeta

    def _chi_prime_action(self, z: FloatArray, v: FloatArray) -> FloatArray:
        return z * (1.0 - z) * v


GEOMETRY_MAP: dict[str, type[MirrorMap]] = {
    "euclidean": EuclideanMirror,
    "simplex": SimplexMirror,
    "hypercube": HypercubeMirror,
}


def make_mirror(geometry: str, d: int) -> MirrorMap:
    """
    Build the mirror map for ``geometry`` in dimension ``d``.

    Raises:
        ConfigError: If the geometry tag is unknown.
    """
    cls = GEOMETRY_MAP[validate_geometry(geometry)]
    return cls(d)


def three_point_residual(m: MirrorMap, xi: Any, zeta: Any, zeta_star: Any) -> float:
    """
    Residual of the three-point identity for ``D_psi*``:

        D(xi, zeta*) - D(zeta, zeta*) + D(zeta, xi) - <xi - zeta, chi(xi) - chi(zeta*)>

    Zero up to roundoff for every valid mirror map.
    """
    lhs = m.bregman_dual(xi, zeta_star)
    rhs = m.bregman_dual(zeta, zeta_star) - m.bregman_dual(zeta, xi)
    diff = np.asarray(xi, dtype=np.float64) - np.asarray(zeta, dtype=np.float64)
    rhs += pairing(diff, m.chi(xi) - m.chi(zeta_star))
    return lhs - rhs
