import math

import numpy as np
import pytest
from scipy.special import fresnel

from spinforge.quadrature import adaptive_simpson, fresnel_integral_c, grid_derivative, grid_integral


def test_fresnel_zero():
    assert fresnel_integral_c(0.0) == 0.0


@pytest.mark.parametrize("u", [0.3, 1.0, 2.5, 2 * math.sqrt(5), 7.0, -1.7])
def test_fresnel_against_scipy(u):
    assert fresnel_integral_c(u) == pytest.approx(fresnel(u)[1], abs=1e-9)


def test_fresnel_reference_value():
    assert math.pi / math.sqrt(5) * fresnel_integral_c(2 * math.sqrt(5)) == pytest.approx(
        0.700896, abs=1e-5)


def test_fresnel_asymptote():
    assert 0.49 < fresnel_integral_c(50.0) < 0.51


def test_adaptive_simpson_polynomial_exact():
    assert adaptive_simpson(lambda x: x ** 3 - 2 * x, 0.0, 2.0, panels=1) == pytest.approx(0.0, abs=1e-14)


def test_adaptive_simpson_reversed_limits():
    assert adaptive_simpson(np.exp, 1.0, 0.0) == pytest.approx(-(math.e - 1), abs=1e-10)


@pytest.mark.parametrize("order", [2, 4])
def test_grid_derivative_order(order):
    errs = []
    for n in (100, 200):
        t = np.linspace(0, 2, n + 1)
        d = grid_derivative(np.sin(3 * t), t[1] - t[0], order=order)
        errs.append(np.max(np.abs(d - 3 * np.cos(3 * t))))
    assert errs[0] / errs[1] == pytest.approx(2 ** order, rel=0.25)


def test_grid_derivative_vector_valued():
    t = np.linspace(0, 1, 51)
    y = np.stack([t ** 2, t], axis=-1)
    d = grid_derivative(y, t[1] - t[0])
    np.testing.assert_allclose(d, np.stack([2 * t, np.ones_like(t)], axis=-1), atol=1e-12)


def test_grid_integral():
    t = np.linspace(0, math.pi, 201)
    assert grid_integral(np.sin(t), t[1] - t[0]) == pytest.approx(2.0, abs=1e-8)
