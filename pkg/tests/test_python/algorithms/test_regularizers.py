import numpy as np
import pytest

from accelmirror import (
    EuclideanMirror,
    EuclideanRegularizer,
    HypercubeMirror,
    ShiftedEntropyRegularizer,
    SimplexMirror,
    regularized_argmin,
)
from accelmirror._common import ConfigError, DimensionError, DomainError
from accelmirror._random import SeededStream
from accelmirror.linops import norm
from accelmirror.regularizers import default_regularizer, project_simplex
from tests.test_python.conftest import random_simplex_point


@pytest.mark.parametrize(
    ("v", "expected"),
    [
        ([0.5, 0.5], [0.5, 0.5]),
        ([2.0, 0.0], [1.0, 0.0]),
        ([0.3, 0.3, 0.3], [1 / 3, 1 / 3, 1 / 3]),
        ([0.4, 0.5], [0.45, 0.55]),
    ],
)
def test_project_simplex_examples(v, expected):
    np.testing.assert_allclose(project_simplex(v), expected, atol=1e-15)


def test_euclidean_argmin_per_geometry():
    reg = EuclideanRegularizer()
    np.testing.assert_allclose(
        reg.argmin(SimplexMirror(2), [1.0, 0.0], [0.5, 0.5], 0.1), [0.45, 0.55], atol=1e-15
    )
    np.testing.assert_array_equal(
        reg.argmin(HypercubeMirror(2), [10.0, -10.0], [0.5, 0.5], 0.1), [0.0, 1.0]
    )
    np.testing.assert_allclose(
        reg.argmin(EuclideanMirror(2), [1.0, 2.0], [0.0, 0.0], 0.5), [-0.5, -1.0]
    )
    assert reg.value([1.0, 0.0], [0.0, 0.0]) == 0.5
    assert reg.lower_bound(5) == reg.upper_bound(5) == 1.0


def test_shifted_entropy_with_zero_gradient_returns_y(stream):
    m = SimplexMirror(4)
    reg = ShiftedEntropyRegularizer(0.3)
    y = random_simplex_point(stream, 4)
    np.testing.assert_allclose(reg.argmin(m, np.zeros(4), y, 1.0), y, atol=1e-10)


def test_shifted_entropy_argmin_lands_on_the_simplex(stream):
    m = SimplexMirror(5)
    reg = ShiftedEntropyRegularizer(0.3)
    for _ in range(50):
        y = random_simplex_point(stream, 5)
        g = 5.0 * stream.normal(5)
        x = reg.argmin(m, g, y, 0.7)
        assert np.all(x >= 0.0)
        assert x.sum() == pytest.approx(1.0, abs=1e-9)


def test_shifted_entropy_argmin_beats_other_simplex_points(stream):
    m = SimplexMirror(3)
    reg = ShiftedEntropyRegularizer(0.3)
    tau = 0.5
    for _ in range(20):
        y = random_simplex_point(stream, 3)
        g = stream.normal(3)
        x = reg.argmin(m, g, y, tau)
        best = tau * float(g @ x) + reg.value(x, y)
        for _ in range(20):
            u = random_simplex_point(stream, 3, floor=0.0)
            assert best <= tau * float(g @ u) + reg.value(u, y) + 1e-9


def test_shifted_entropy_zeroes_heavily_penalized_coordinates():
    m = SimplexMirror(3)
    x = ShiftedEntropyRegularizer(0.3).argmin(m, [1.0, 0.0, 0.0], [1 / 3] * 3, 100.0)
    assert x[0] == 0.0
    np.testing.assert_allclose(x[1:], [0.5, 0.5], atol=1e-10)


def test_shifted_entropy_quadratic_sandwich(stream):
    reg = ShiftedEntropyRegularizer(0.3)
    d = 4
    lo, hi = reg.lower_bound(d), reg.upper_bound(d)
    assert lo == pytest.approx(1.0 / 2.2)
    assert hi == pytest.approx(1.0 / 0.3)
    for _ in range(100):
        x, y = random_simplex_point(stream, d), random_simplex_point(stream, d)
        dist = norm(x - y, "l1") ** 2
        value = reg.value(x, y)
        assert 0.5 * lo * dist <= value + 1e-12
        assert value <= 0.5 * hi * dist + 1e-12


def test_shifted_entropy_validation():
    with pytest.raises(ConfigError):
        ShiftedEntropyRegularizer(0.0)
    reg = ShiftedEntropyRegularizer()
    with pytest.raises(DomainError):
        reg.argmin(HypercubeMirror(2), [0.0, 0.0], [0.5, 0.5], 1.0)
    with pytest.raises(DomainError):
        reg.argmin(SimplexMirror(2), [0.0, 0.0], [0.5, 0.5], 0.0)
    with pytest.raises(DimensionError):
        reg.argmin(SimplexMirror(2), [0.0, 0.0, 0.0], [0.5, 0.5], 1.0)
    assert reg.describe() == "shifted_entropy:0.3"


def test_default_regularizer_follows_the_geometry():
    assert isinstance(default_regularizer(SimplexMirror(3)), ShiftedEntropyRegularizer)
    assert default_regularizer(SimplexMirror(3), eps=0.1).eps == 0.1
    assert isinstance(default_regularizer(HypercubeMirror(3)), EuclideanRegularizer)
    assert isinstance(default_regularizer(EuclideanMirror(3)), EuclideanRegularizer)


def test_regularized_argmin_matches_the_method():
    m = SimplexMirror(3)
    reg = ShiftedEntropyRegularizer()
    args = ([0.2, -0.1, 0.4], [0.2, 0.3, 0.5], 0.8)
    np.testing.assert_array_equal(regularized_argmin(reg, m, *args), reg.argmin(m, *args))


def test_symmetric_point_with_constant_gradient_is_fixed():
    x = ShiftedEntropyRegularizer(0.3).argmin(SimplexMirror(2), [0.7, 0.7], [0.5, 0.5], 2.0)
    np.testing.assert_allclose(x, [0.5, 0.5], atol=1e-12)


def _projected_gradient_oracle(g, y, tau, eps, iters=3000):
    """Minimize tau <g, x> + R(x, y) over the simplex with step eps (= 1 / L_R)."""
    x = np.array(y, dtype=np.float64)
    for _ in range(iters):
        grad = tau * g + np.log((x + eps) / (y + eps))
        x = project_simplex(x - eps * grad)
    return x


def test_shifted_entropy_argmin_matches_a_brute_force_oracle():
    eps, tau = 0.3, 0.5
    reg = ShiftedEntropyRegularizer(eps)
    stream = SeededStream(71)
    for i in range(50):
        d = 2 + i % 4
        y = random_simplex_point(stream, d)
        g = 2.0 * stream.normal(d)
        x = reg.argmin(SimplexMirror(d), g, y, tau)
        oracle = _projected_gradient_oracle(g, y, tau, eps)
        assert float(np.max(np.abs(x - oracle))) <= 1e-6


def test_uniform_start_example_matches_the_oracle():
    g = np.array([1.0, 0.0, -1.0])
    y = np.full(3, 1 / 3)
    x = ShiftedEntropyRegularizer(0.3).argmin(SimplexMirror(3), g, y, 0.5)
    np.testing.assert_allclose(x, _projected_gradient_oracle(g, y, 0.5, 0.3), atol=1e-6)
    assert x[0] < x[1] < x[2]
