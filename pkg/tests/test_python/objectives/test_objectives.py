import numpy as np
import pytest

from accelmirror import (
    DenseMatrix,
    FunctionObjective,
    PowerObjective,
    QuadraticObjective,
    norm,
)
from accelmirror._common import ConfigError, DimensionError, DomainError, dual_norm
from accelmirror._random import SeededStream
from accelmirror.objectives import (
    absolute_smoothness,
    finite_difference_gradient,
    power_eval_grad,
    quadratic_eval_grad,
    relative_smoothness,
)
from tests.test_python.conftest import random_quadratic, random_simplex_point


def test_quadratic_eval_grad_examples():
    value, grad = quadratic_eval_grad(QuadraticObjective(DenseMatrix.identity(2)), [1.0, 0.0])
    assert value == 0.5
    np.testing.assert_array_equal(grad, [1.0, 0.0])

    q = QuadraticObjective.from_gram(DenseMatrix([[2.0, 1.0], [1.0, 2.0]]))
    value, grad = q.eval_grad([1.0, 1.0])
    assert value == pytest.approx(3.0)
    np.testing.assert_allclose(grad, [3.0, 3.0])
    assert q.B is None


def test_quadratic_keeps_only_the_gram_matrix():
    B = DenseMatrix([[1.0, 2.0], [0.0, 1.0], [1.0, 0.0]])
    q = QuadraticObjective(B)
    assert q.d == 2
    np.testing.assert_allclose(q.G.array, [[2.0, 2.0], [2.0, 5.0]])


def test_centered_quadratic_vanishes_at_its_center():
    c = [0.2, 0.3, 0.5]
    q = random_quadratic(SeededStream(3), 3, center=c)
    value, grad = q.eval_grad(c)
    assert value == 0.0
    np.testing.assert_array_equal(grad, np.zeros(3))
    assert q.value([1.0, 0.0, 0.0]) > 0.0


def test_from_gram_rejects_asymmetric_matrices():
    with pytest.raises(DomainError):
        QuadraticObjective.from_gram(DenseMatrix([[1.0, 2.0], [0.0, 1.0]]))


def test_power_eval_grad_examples():
    value, grad = power_eval_grad(2, [1.0, 0.0])
    assert value == pytest.approx(0.25)
    np.testing.assert_allclose(grad, [0.5, -0.5])

    value, _ = power_eval_grad(10, [0.999, 0.001])
    assert value == pytest.approx(0.499**10 * 2 / 10, rel=1e-12)


@pytest.mark.parametrize("p", [3, 1, 0, -2])
def test_power_objective_rejects_bad_exponents(p):
    with pytest.raises(DomainError):
        PowerObjective(p, 2)


def test_power_objective_has_no_absolute_smoothness():
    f = PowerObjective(10, 2)
    assert not f.has_absolute_smoothness
    with pytest.raises(ConfigError):
        f.absolute_smoothness("l1")


def test_absolute_smoothness_by_norm():
    q = QuadraticObjective.from_gram(DenseMatrix([[2.0, -5.0], [-5.0, 2.0]]))
    assert absolute_smoothness(q, "l1") == 5.0
    p = QuadraticObjective.from_gram(DenseMatrix([[2.0, 1.0], [1.0, 2.0]]))
    assert p.absolute_smoothness("l2") == pytest.approx(3.0, rel=1e-8)
    with pytest.raises(DomainError):
        p.absolute_smoothness("linf")


def test_relative_smoothness_examples():
    identity = QuadraticObjective(DenseMatrix.identity(4))
    assert relative_smoothness(identity, np.full(4, 0.25)) == pytest.approx(0.25)

    q = QuadraticObjective.from_gram(DenseMatrix([[2.0, 1.0], [1.0, 2.0]]))
    assert relative_smoothness(q, [1.0, 0.0]) == pytest.approx(2.0)
    with pytest.raises(DomainError):
        q.relative_smoothness([1.5, -0.5])


def test_relative_smoothness_never_exceeds_absolute_on_the_simplex(stream):
    for _ in range(10):
        q = random_quadratic(stream, 6)
        x = random_simplex_point(stream, 6)
        assert q.relative_smoothness(x) <= q.absolute_smoothness("l1") * (1.0 + 1e-9)


def test_function_objective():
    f = FunctionObjective(2, lambda x: float(x @ x), lambda x: 2.0 * x, L_f=2.0)
    assert f.value([1.0, 2.0]) == 5.0
    np.testing.assert_array_equal(f.gradient([1.0, 2.0]), [2.0, 4.0])
    assert f.absolute_smoothness("l2") == 2.0

    bad = FunctionObjective(2, lambda x: 0.0, lambda x: [1.0, 2.0, 3.0])
    with pytest.raises(DimensionError):
        bad.gradient([0.0, 0.0])
    with pytest.raises(ConfigError):
        bad.absolute_smoothness()


def test_objectives_check_the_input_length():
    with pytest.raises(DimensionError):
        PowerObjective(10, 2).value([0.5, 0.5, 0.5])
    with pytest.raises(DimensionError):
        QuadraticObjective(DenseMatrix.identity(2)).gradient([1.0])
    with pytest.raises(DimensionError):
        PowerObjective(10, 0)


def _assert_gradient_matches_finite_differences(f, x):
    fd = finite_difference_gradient(f, x)
    g = np.asarray(f.gradient(x))
    scale = max(1.0, float(np.max(np.abs(g))))
    assert float(np.max(np.abs(fd - g))) <= 1e-6 * scale


def test_quadratic_gradient_matches_finite_differences():
    stream = SeededStream(21)
    for _ in range(100):
        q = random_quadratic(stream, 5)
        _assert_gradient_matches_finite_differences(q, random_simplex_point(stream, 5))


def test_power_gradient_matches_finite_differences():
    stream = SeededStream(22)
    for i in range(100):
        p = 2 * (1 + i % 5)
        f = PowerObjective(p, 4)
        _assert_gradient_matches_finite_differences(f, random_simplex_point(stream, 4))


def test_objectives_are_convex_along_sampled_segments():
    stream = SeededStream(23)
    for i in range(200):
        if i % 2 == 0:
            f = random_quadratic(stream, 4)
        else:
            f = PowerObjective(2 * (1 + i % 5), 4)
        x, y = random_simplex_point(stream, 4), random_simplex_point(stream, 4)
        t = float(stream.uniform(1)[0])
        mixed = f.value(t * x + (1.0 - t) * y)
        tol = 1e-12 * (1.0 + abs(f.value(x)) + abs(f.value(y)))
        assert mixed <= t * f.value(x) + (1.0 - t) * f.value(y) + tol
        # First-order form: f(y) >= f(x) + <grad f(x), y - x>.
        assert f.value(y) >= f.value(x) + float(np.dot(f.gradient(x), y - x)) - tol


@pytest.mark.parametrize("kind", ["l1", "l2"])
def test_quadratic_gradient_is_lipschitz_with_constant_L_f(kind):
    stream = SeededStream(24)
    for _ in range(50):
        f = random_quadratic(stream, 5, center=stream.normal(5))
        L = f.absolute_smoothness(kind)
        for _ in range(10):
            x, y = stream.normal(5), stream.normal(5)
            moved = norm(f.gradient(x) - f.gradient(y), dual_norm(kind))
            assert moved <= L * norm(x - y, kind) * (1.0 + 1e-6)
