"""Structural properties every mirror map must satisfy, on seeded samples."""

import numpy as np
import pytest

from accelmirror import SimplexMirror, make_mirror, norm
from accelmirror._random import SeededStream
from accelmirror.mirror import three_point_residual
from tests.test_python.conftest import random_interior_point


def test_chi_inverts_grad_phi_on_interior_samples(geometry):
    stream = SeededStream(11)
    m = make_mirror(geometry, 5)
    worst = 0.0
    for _ in range(1000):
        z = random_interior_point(m, stream)
        worst = max(worst, float(np.max(np.abs(m.chi(m.grad_phi(z)) - z))))
    assert worst <= 1e-10


def test_simplex_chi_ignores_shifts_along_all_ones():
    stream = SeededStream(12)
    m = SimplexMirror(5)
    for _ in range(1000):
        zeta = 3.0 * stream.normal(5)
        c = 20.0 * (float(stream.uniform(1)[0]) - 0.5)
        np.testing.assert_allclose(m.chi(zeta + c), m.chi(zeta), rtol=0, atol=1e-12)


def test_project_normal_lies_in_the_normal_space(geometry):
    stream = SeededStream(13)
    m = make_mirror(geometry, 4)
    for _ in range(200):
        zeta = stream.normal(4)
        v = np.asarray(m.project_normal(zeta))
        if geometry == "simplex":
            np.testing.assert_allclose(v, np.full(4, v[0]), atol=1e-12)
            np.testing.assert_allclose(m.chi(zeta + v), m.chi(zeta), atol=1e-12)
        else:
            np.testing.assert_allclose(v, np.zeros(4), atol=1e-12)


def test_grad_phi_of_chi_differs_from_zeta_by_the_normal_component(geometry):
    stream = SeededStream(14)
    m = make_mirror(geometry, 4)
    for _ in range(100):
        zeta = stream.normal(4)
        np.testing.assert_allclose(
            m.grad_phi(m.chi(zeta)) - zeta, m.project_normal(zeta), atol=1e-12
        )


def test_dual_divergence_equals_primal_divergence_of_mirror_images(geometry):
    stream = SeededStream(15)
    m = make_mirror(geometry, 4)
    for _ in range(100):
        xi, zeta = stream.normal(4), stream.normal(4)
        dual_value = m.bregman_dual(xi, zeta)
        primal_value = m.bregman_primal(m.chi(zeta), m.chi(xi))
        assert dual_value == pytest.approx(primal_value, rel=1e-9, abs=1e-14)
        assert dual_value >= 0.0
        assert m.bregman_dual(zeta, zeta) == pytest.approx(0.0, abs=1e-15)


def test_three_point_identity(geometry):
    stream = SeededStream(16)
    m = make_mirror(geometry, 5)
    for _ in range(200):
        xi, zeta, zeta_star = stream.normal(5), stream.normal(5), stream.normal(5)
        assert abs(three_point_residual(m, xi, zeta, zeta_star)) <= 1e-9


def test_chi_lands_in_the_feasible_set(geometry):
    stream = SeededStream(17)
    m = make_mirror(geometry, 6)
    for _ in range(200):
        x = m.chi(10.0 * stream.normal(6))
        assert m.feasible_set.contains(x)


def test_chi_is_lipschitz_with_constant_L_chi(geometry):
    stream = SeededStream(18)
    m = make_mirror(geometry, 5)
    for _ in range(500):
        xi, zeta = 3.0 * stream.normal(5), 3.0 * stream.normal(5)
        moved = norm(m.chi(xi) - m.chi(zeta), m.primal_norm)
        assert moved <= m.L_chi * norm(xi - zeta, m.dual_norm) * (1.0 + 1e-9) + 1e-12


def test_primal_divergence_is_strongly_convex(geometry):
    # phi is (1/L_chi)-strongly convex in the primal norm.
    stream = SeededStream(19)
    m = make_mirror(geometry, 5)
    for _ in range(500):
        x, z = random_interior_point(m, stream), random_interior_point(m, stream)
        lower = 0.5 / m.L_chi * norm(x - z, m.primal_norm) ** 2
        assert m.bregman_primal(x, z) >= lower * (1.0 - 1e-9) - 1e-12
