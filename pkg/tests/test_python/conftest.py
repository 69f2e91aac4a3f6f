from collections.abc import Sequence
from typing import Any

import numpy as np
import pytest

from accelmirror import (
    DenseMatrix,
    FunctionObjective,
    MirrorMap,
    PowerObjective,
    QuadraticObjective,
    SimplexMirror,
)
from accelmirror._random import SeededStream

GEOMETRIES = ("euclidean", "simplex", "hypercube")
TOY_X0 = (0.999, 0.001)
GOLDEN_RATIO = (1.0 + 5.0**0.5) / 2.0


def random_simplex_point(stream: SeededStream, d: int, floor: float = 1e-3) -> np.ndarray:
    """Strictly interior simplex point: uniform draws plus ``floor``, normalized."""
    u = stream.uniform(d) + floor
    return u / u.sum()


def random_interior_point(m: MirrorMap, stream: SeededStream) -> np.ndarray:
    """A relative-interior point of ``m``'s feasible set."""
    if m.geometry == "simplex":
        return random_simplex_point(stream, m.d)
    if m.geometry == "hypercube":
        return 0.01 + 0.98 * stream.uniform(m.d)
    return stream.normal(m.d)


def random_quadratic(
    stream: SeededStream, d: int, center: Sequence[float] | None = None
) -> QuadraticObjective:
    """``1/2 (x - c)^T B^T B (x - c)`` with a standard-normal ``B``."""
    B = DenseMatrix(stream.normal(d * d), rows=d, cols=d)
    return QuadraticObjective(B, center=center)


def half_square(d: int, center: Sequence[float] | None = None) -> QuadraticObjective:
    """``1/2 ||x - c||^2``."""
    return QuadraticObjective(DenseMatrix.identity(d), center=center)


def linear_objective(g: Sequence[float]) -> FunctionObjective:
    """``<g, x>``, whose gradient is the constant ``g``."""
    grad = np.asarray(g, dtype=np.float64)
    return FunctionObjective(len(grad), lambda x: float(grad @ x), lambda x: grad)


def zero_objective(d: int) -> FunctionObjective:
    return FunctionObjective(d, lambda x: 0.0, lambda x: np.zeros(d))


def assert_nonincreasing(values: Sequence[Any], slack: float) -> None:
    """Every consecutive rise must stay within ``slack``."""
    for k, (prev, cur) in enumerate(zip(values, values[1:]), start=1):
        assert cur <= prev + slack, f"rise of {cur - prev:.3e} at k={k}"


@pytest.fixture
def stream() -> SeededStream:
    return SeededStream(0)


@pytest.fixture(params=GEOMETRIES)
def geometry(request: pytest.FixtureRequest) -> str:
    return request.param


@pytest.fixture
def toy_problem() -> tuple[SimplexMirror, PowerObjective, np.ndarray]:
    """The two-dimensional p=10 power objective on the simplex, started near a vertex."""
    return SimplexMirror(2), PowerObjective(10, 2), np.array(TOY_X0)
