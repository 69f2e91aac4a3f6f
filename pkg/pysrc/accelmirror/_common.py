"""Common constants, type aliases, exceptions and validators shared across modules."""

from __future__ import annotations

import math
from collections.abc import Sequence
from typing import Any, Final, Literal, Union

import numpy as np
from numpy.typing import NDArray

# Type aliases
FloatArray = NDArray[np.float64]
"""Type alias for a one- or two-dimensional float64 NumPy array."""

ArrayLike = Union[Sequence[float], FloatArray]
"""Anything accepted where a vector is expected."""

NormKind = Literal["l1", "l2", "linf"]
"""Tag of a primal (or dual) norm."""

Geometry = Literal["euclidean", "simplex", "hypercube"]
"""Tag of a shipped mirror-map geometry."""

NORM_KINDS: Final[tuple[NormKind, ...]] = ("l1", "l2", "linf")
GEOMETRIES: Final[tuple[Geometry, ...]] = ("euclidean", "simplex", "hypercube")

DUAL_NORM: Final[dict[NormKind, NormKind]] = {
    "l1": "linf",
    "l2": "l2",
    "linf": "l1",
}
"""Mapping from a norm to its dual norm (an involution)."""

NORM_ORD: Final[dict[NormKind, float]] = {
    "l1": 1.0,
    "l2": 2.0,
    "linf": math.inf,
}

# Numerical defaults
POWER_ITERATION_TOL: Final[float] = 1e-10
POWER_ITERATION_MAX_ITERS: Final[int] = 10_000
POWER_ITERATION_SEED: Final[int] = 0
SYMMETRY_TOL: Final[float] = 1e-12
INTERIOR_FLOOR: Final[float] = 1e-300  # "relative interior" means components above this
SIMPLEX_SUM_TOL: Final[float] = 1e-9
REPORT_CLAMP_TOL: Final[float] = 1e-12
BISECTION_TOL: Final[float] = 1e-12
AMDR_EPSILON: Final[float] = 0.3
AMDR_R: Final[float] = 3.0
AMDR_GAMMA: Final[float] = 1.0
ODE_T0: Final[float] = 1e-3
STEP3_DRIFT_TOL: Final[float] = 1e-12


# ---------------------------
# Exceptions
# ---------------------------


class AccelMirrorError(Exception):
    """Base class for all errors raised by accelmirror."""


class DimensionError(AccelMirrorError, ValueError):
    """Raised when vector or matrix shapes do not match."""


class DomainError(AccelMirrorError, ValueError):
    """Raised when an argument lies outside the set where an operation is defined."""


class ConfigError(AccelMirrorError, ValueError):
    """Raised for invalid experiment configuration."""


class ConvergenceError(AccelMirrorError, RuntimeError):
    """Raised when an iterative procedure fails to converge."""


class StepSizeUnderflowError(ConvergenceError):
    """Raised when the adaptive integrator step size collapses (a stiffness signal)."""


class NumericalFailure(AccelMirrorError, RuntimeError):
    """
    Raised when a solver produces a non-finite quantity.

    Attributes:
        k: Iteration index at which the failure was detected.
        quantity: Name of the offending quantity (e.g. ``"x"`` or ``"f_gap"``).
    """

    def __init__(self, message: str, *, k: int | None = None, quantity: str = ""):
        super().__init__(message)
        self.k = k
        self.quantity = quantity


# ---------------------------
# Validators
# ---------------------------


def dual_norm(kind: NormKind) -> NormKind:
    """
    Return the dual of a norm tag.

    Raises:
        ValueError: If ``kind`` is not a known norm tag.
    """
    try:
        return DUAL_NORM[kind]
    except KeyError:
        raise ValueError(f"Unknown norm kind: {kind!r}") from None


def validate_geometry(geometry: Any) -> Geometry:
    """
    Validate a geometry tag.

    Raises:
        ConfigError: If ``geometry`` is not one of the shipped geometries.
    """
    if geometry not in GEOMETRIES:
        raise ConfigError(
            f"Unknown geometry {geometry!r}; expected one of {', '.join(GEOMETRIES)}"
        )
    return geometry  # type: ignore[no-any-return]


def as_float_vector(values: Any, name: str = "vector") -> FloatArray:
    """
    Convert ``values`` to a fresh one-dimensional float64 array with finite entries.

    Args:
        values: Sequence of real scalars or a NumPy array.
        name: Name used in error messages.

    Returns:
        A new float64 array.

    Raises:
        DimensionError: If ``values`` is not one-dimensional.
        DomainError: If any entry is NaN or infinite.
    """
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must have finite entries")
    return arr


def validate_same_length(a: FloatArray, b: FloatArray, what: str = "operands") -> None:
    """
    Raise DimensionError unless ``a`` and ``b`` have equal length.
    """
    if a.shape[0] != b.shape[0]:
        raise DimensionError(
            f"{what} have mismatched lengths {a.shape[0]} and {b.shape[0]}"
        )


def validate_positive(value: float, name: str) -> float:
    """
    Return ``value`` as a float after checking it is finite and strictly positive.

    Raises:
        DomainError: If the value is not a positive finite number.
    """
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise DomainError(f"{name} must be a positive finite number, got {value!r}")
    return value


def frozen(arr: FloatArray) -> FloatArray:
    """Mark an array read-only in place and return it."""
    arr.setflags(write=False)
    return arr
