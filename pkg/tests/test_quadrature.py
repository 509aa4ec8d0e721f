import math

import numpy as np
import pytest

from errors import DomainError
from models import Cube, QuadConfig
from services.quadrature import (
    gauss_legendre,
    integrate_cube,
    integrate_interval,
    integrate_semi_infinite,
    panel_cuts,
)
from services.reduction import tree_sum, tree_sum_array


def test_polynomial_is_exact(quad):
    result = integrate_interval(lambda x: x ** 5, (0.0, 1.0), quad)
    assert result.converged
    assert abs(result.value - 1.0 / 6.0) <= 1e-14


@pytest.mark.parametrize("omega", [1.0, 3.5, 17.0, 64.0])
def test_oscillation_resolution(quad, omega):
    exact = (np.exp(2j * math.pi * omega) - 1.0) / (1j * omega)
    result = integrate_interval(lambda x: np.exp(1j * omega * x), (0.0, 2 * math.pi), quad)
    assert result.converged
    assert abs(result.value - exact) <= 1e-10 * max(1.0, abs(exact))


def test_kink_at_breakpoint():
    cfg = QuadConfig(breakpoints=(0.3,))
    result = integrate_interval(lambda x: np.abs(x - 0.3), (0.0, 1.0), cfg)
    assert abs(result.value - 0.29) <= 1e-13


def test_reversed_bounds_rejected(quad):
    with pytest.raises(DomainError):
        integrate_interval(lambda x: x, (1.0, 0.0), quad)


def test_panel_cap_reports_unconverged():
    cfg = QuadConfig(max_panels_per_axis=2, abs_tol=1e-14)
    result = integrate_interval(lambda x: np.sqrt(np.abs(x - 0.123456)), (0.0, 1.0), cfg)
    assert not result.converged
    assert result.err_est > 0


def test_semi_infinite_exponential(quad):
    result = integrate_semi_infinite(lambda y: np.exp(-y), quad)
    assert abs(result.value - 1.0) <= 1e-9


def test_vector_valued_integrand(quad):
    result = integrate_interval(lambda x: np.stack([x, x ** 2], axis=1), (0.0, 1.0), quad)
    assert np.allclose(result.value, [0.5, 1.0 / 3.0], atol=1e-14)


def test_cube_product(quad):
    cube = Cube.from_bounds([0.0, 0.0], [1.0, 1.0])
    result = integrate_cube(lambda p: p[:, 0] * p[:, 1], cube, quad)
    assert result.converged
    assert abs(result.value - 0.25) <= 1e-14


def test_cube_with_jump_on_breakpoint(quad):
    cube = Cube.from_bounds([0.0, 0.0], [1.0, 1.0])
    result = integrate_cube(lambda p: (p[:, 0] < 0.4).astype(float), cube, quad, [(0.4,), ()])
    assert abs(result.value - 0.4) <= 1e-13


def test_cube_dimension_limit(quad):
    with pytest.raises(DomainError):
        integrate_cube(lambda p: p[:, 0], Cube.around(np.zeros(5), 1.0), quad)


def test_panel_cuts_cap_width():
    cuts = panel_cuts(0.0, 10.0, breakpoints=(3.0, 20.0), max_width=2.0)
    assert cuts[0] == 0.0 and cuts[-1] == 10.0
    assert 3.0 in cuts
    assert max(b - a for a, b in zip(cuts[:-1], cuts[1:])) <= 2.0 + 1e-12


def test_gauss_legendre_cached_read_only():
    nodes, weights = gauss_legendre(16)
    assert gauss_legendre(16)[0] is nodes
    assert abs(weights.sum() - 2.0) <= 1e-14
    with pytest.raises(ValueError):
        nodes[0] = 0.0


def test_tree_sum_is_order_fixed():
    values = [1e16, 1.0, -1e16, 1.0]
    assert tree_sum(values) == tree_sum(list(values))
    assert tree_sum([]) == 0
    assert np.allclose(tree_sum_array(np.arange(12.0).reshape(6, 2)), [30.0, 36.0])


def test_interval_rule_is_linear(quad):
    def f(x):
        return np.exp(1j * 3.0 * x) * np.exp(-(x ** 2))

    def g(x):
        return np.cos(x) / (1.0 + x ** 2)

    a, b = 2.5 - 1j, -0.75
    combined = integrate_interval(lambda x: a * f(x) + b * g(x), (-2.0, 3.0), quad).value
    separate = a * integrate_interval(f, (-2.0, 3.0), quad).value + b * integrate_interval(g, (-2.0, 3.0), quad).value
    assert abs(combined - separate) <= 1e-10


def test_cube_rule_is_linear(quad):
    cube = Cube((0.1, -0.2), (0.5, 0.25))

    def f(p):
        return np.exp(1j * (p[:, 0] - 0.1)) * p[:, 1] ** 2

    def g(p):
        return np.sin(p[:, 0] + p[:, 1])

    combined = integrate_cube(lambda p: 3.0 * f(p) - 1j * g(p), cube, quad).value
    separate = 3.0 * integrate_cube(f, cube, quad).value - 1j * integrate_cube(g, cube, quad).value
    assert abs(combined - separate) <= 1e-10
