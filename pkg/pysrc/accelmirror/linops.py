"""
Dense linear-algebra substrate.

Primal and dual vectors are kept as distinct ``NewType`` wrappers around
read-only float64 arrays, so a type checker catches a dual vector passed where
a primal point is expected.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from typing import Any, NewType

import numpy as np

from ._common import (
    NORM_ORD,
    POWER_ITERATION_MAX_ITERS,
    POWER_ITERATION_SEED,
    POWER_ITERATION_TOL,
    SYMMETRY_TOL,
    ConvergenceError,
    DimensionError,
    DomainError,
    FloatArray,
    NormKind,
    as_float_vector,
    frozen,
    validate_same_length,
)

logger = logging.getLogger(__name__)

PrimalVec = NewType("PrimalVec", FloatArray)
"""A point of the primal space E (read-only float64 array)."""

DualVec = NewType("DualVec", FloatArray)
"""A point of the dual space E* (read-only float64 array)."""


def primal(values: Any) -> PrimalVec:
    """
    Build a PrimalVec from a sequence or array.

    Raises:
        DimensionError: If the input is not one-dimensional.
        DomainError: If an entry is not finite.
    """
    return PrimalVec(frozen(as_float_vector(values, "primal vector")))


def dual(values: Any) -> DualVec:
    """
    Build a DualVec from a sequence or array.

    Raises:
        DimensionError: If the input is not one-dimensional.
        DomainError: If an entry is not finite.
    """
    return DualVec(frozen(as_float_vector(values, "dual vector")))


class DenseMatrix:
    """
    Immutable dense real matrix stored row-major.

    Accepts either a nested sequence / 2-D array, or a flat row-major
    sequence together with ``rows`` and ``cols``.

    Example:
        ```python
        M = DenseMatrix([[2.0, 1.0], [1.0, 2.0]])
        N = DenseMatrix([2.0, 1.0, 1.0, 2.0], rows=2, cols=2)
        ```
    """

    __slots__ = ("_data",)

    def __init__(
        self, entries: Any, rows: int | None = None, cols: int | None = None
    ):
        data = np.array(entries, dtype=np.float64)
        if rows is not None or cols is not None:
            if rows is None or cols is None:
                raise DimensionError("rows and cols must be given together")
            if data.ndim != 1 or data.size != rows * cols:
                raise DimensionError(
                    f"{data.size} entries cannot fill a {rows}x{cols} matrix"
                )
            data = data.reshape(rows, cols)
        elif data.ndim != 2:
            # Empty nested lists come through as shape (0,)
            if data.size == 0:
                data = data.reshape(0, 0)
            else:
                raise DimensionError(
                    f"matrix entries must be two-dimensional, got shape {data.shape}"
                )
        if not np.all(np.isfinite(data)):
            raise DomainError("matrix entries must be finite")
        self._data = frozen(data)

    @classmethod
    def identity(cls, n: int) -> DenseMatrix:
        return cls(np.eye(n))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> DenseMatrix:
        return cls(np.zeros((rows, cols)))

    @property
    def rows(self) -> int:
        return int(self._data.shape[0])

    @property
    def cols(self) -> int:
        return int(self._data.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def array(self) -> FloatArray:
        """Read-only 2-D view of the entries."""
        return self._data

    @property
    def entries(self) -> FloatArray:
        """Row-major flat view of the entries."""
        return self._data.reshape(-1)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_symmetric(self, tol: float = SYMMETRY_TOL) -> bool:
        """True when square and ``|M - M^T| <= tol * max(1, max|M|)`` entrywise."""
        if not self.is_square():
            return False
        if self._data.size == 0:
            return True
        scale = max(1.0, float(np.max(np.abs(self._data))))
        return bool(np.all(np.abs(self._data - self._data.T) <= tol * scale))

    def transpose(self) -> DenseMatrix:
        return DenseMatrix(self._data.T)

    def gram(self) -> DenseMatrix:
        """Return ``M^T M``, symmetrized to remove roundoff asymmetry."""
        g = self._data.T @ self._data
        return DenseMatrix(0.5 * (g + g.T))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DenseMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._data, other._data))

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"DenseMatrix(rows={self.rows}, cols={self.cols})"


def pairing(zeta: DualVec | Sequence[float], x: PrimalVec | Sequence[float]) -> float:
    """
    Dual pairing ``<zeta, x> = sum_j zeta_j x_j``.

    Raises:
        DimensionError: If the lengths differ.
    """
    z = np.asarray(zeta, dtype=np.float64)
    v = np.asarray(x, dtype=np.float64)
    validate_same_length(z, v, "pairing operands")
    return float(np.dot(z, v))


def norm(v: Any, kind: NormKind) -> float:
    """
    The l1, l2 or linf norm of ``v``.

    Raises:
        ValueError: If ``kind`` is not a known norm tag.
    """
    try:
        order = NORM_ORD[kind]
    except KeyError:
        raise ValueError(f"Unknown norm kind: {kind!r}") from None
    arr = np.asarray(v, dtype=np.float64)
    if arr.size == 0:
        return 0.0
    return float(np.linalg.norm(arr, ord=order))


def matvec(M: DenseMatrix, x: Any) -> FloatArray:
    """
    Dense product ``M x``.

    Raises:
        DimensionError: If ``M.cols != len(x)``.
    """
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1 or v.shape[0] != M.cols:
        raise DimensionError(
            f"cannot multiply a {M.rows}x{M.cols} matrix by a vector of shape {v.shape}"
        )
    return M.array @ v


def max_abs_entry(M: DenseMatrix) -> float:
    """
    Largest absolute entry of ``M``.

    Raises:
        DomainError: If ``M`` has no entries.
    """
    if M.array.size == 0:
        raise DomainError("max_abs_entry of an empty matrix is undefined")
    return float(np.max(np.abs(M.array)))


def spectral_radius(
    M: DenseMatrix,
    tol: float = POWER_ITERATION_TOL,
    max_iters: int = POWER_ITERATION_MAX_ITERS,
    *,
    seed: int = POWER_ITERATION_SEED,
) -> float:
    """
    Dominant eigenvalue magnitude of a symmetric matrix by power iteration.

    The start vector is all-ones plus a small seeded perturbation. Iteration
    stops when the Rayleigh quotient changes by less than ``tol`` relative to
    its current value.

    Args:
        M: Square symmetric matrix.
        tol: Relative change of the Rayleigh quotient that ends the iteration.
        max_iters: Iteration budget.
        seed: Seed of the start-vector perturbation.

    Returns:
        ``|lambda_max|``.

    Raises:
        DimensionError: If ``M`` is not square.
        DomainError: If ``M`` is not symmetric.
        ConvergenceError: If the budget is exhausted.
    """
    if not M.is_square():
        raise DimensionError(f"spectral_radius needs a square matrix, got {M.shape}")
    if not M.is_symmetric():
        raise DomainError("spectral_radius needs a symmetric matrix")
    n = M.rows
    if n == 0:
        return 0.0
    A = M.array
    if not np.any(A):
        return 0.0

    rng = np.random.Generator(np.random.PCG64(seed))
    v = np.ones(n) + 1e-3 * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    w = A @ v
    rayleigh = float(v @ w)

    for it in range(1, max_iters + 1):
        w_norm = float(np.linalg.norm(w))
        if w_norm == 0.0:
            # Start vector landed in the null space; the perturbation makes this rare.
            v = rng.standard_normal(n)
            v /= np.linalg.norm(v)
            w = A @ v
            continue
        v = w / w_norm
        w = A @ v
        new_rayleigh = float(v @ w)
        denom = abs(new_rayleigh)
        change = abs(new_rayleigh - rayleigh)
        rayleigh = new_rayleigh
        if denom > 0.0 and change <= tol * denom:
            logger.debug("power iteration converged after %d iterations", it)
            return abs(rayleigh)

    raise ConvergenceError(
        f"power iteration did not converge within {max_iters} iterations "
        f"(last estimate {rayleigh!r})"
    )


def max_abs_row_sum(M: DenseMatrix) -> float:
    """Induced linf norm, an upper bound on the spectral radius."""
    if M.array.size == 0:
        return 0.0
    return float(np.max(np.sum(np.abs(M.array), axis=1)))


def is_finite(v: Any) -> bool:
    return bool(np.all(np.isfinite(np.asarray(v, dtype=np.float64))))
