import math

import numpy as np
import pytest

from layerheat import Half, contour_nodes, real_axis_nodes
from layerheat.contour import INNER_ANGLE
from layerheat.errors import NonPositiveTime


def test_center_node():
    g = contour_nodes(Half.PLUS, 10, 2001)
    assert g.nodes[1000] == pytest.approx(1j * math.sin(math.pi / 8), abs=1e-15)


def test_minus_half_is_negated_plus_half():
    p = contour_nodes(Half.PLUS, 10, 2001)
    m = contour_nodes(Half.MINUS, 10, 2001)
    np.testing.assert_array_equal(m.nodes, -p.nodes)
    np.testing.assert_array_equal(m.weights, -p.weights)
    np.testing.assert_array_equal(p.mirrored().nodes, m.nodes)


def test_half_planes_and_symmetry():
    p = contour_nodes(Half.PLUS, 10, 2001)
    assert np.all(p.nodes.imag > 0)
    assert np.all(contour_nodes(Half.MINUS, 10, 2001).nodes.imag < 0)
    np.testing.assert_allclose(p.theta, -p.theta[::-1], atol=1e-15)
    # nu(-theta) = -conj(nu(theta))
    np.testing.assert_allclose(p.nodes[::-1], -np.conj(p.nodes), atol=1e-12)


def test_re_nu_squared_sign_on_the_default_curve():
    # Negative only near theta = 0: the asymptotes are at angles pi/8 and 7pi/8.
    p = contour_nodes(Half.PLUS, 10, 2001)
    w = p.nodes ** 2
    assert np.all(w.real[np.abs(p.theta) < 0.4] < 0)
    assert np.all(w.real[np.abs(p.theta) > 0.5] > 0)


def test_inner_curve_has_constant_negative_re_nu_squared():
    p = contour_nodes(Half.PLUS, 10, 2001, angle=INNER_ANGLE)
    w = p.nodes ** 2
    assert np.all(np.abs(w.real + 0.5) <= 1e-15 * np.abs(w) + 1e-15)


def test_weights_integrate_polynomial_exactly_along_curve():
    # int_C nu dnu = (nu_end**2 - nu_start**2) / 2; the trapezoid rule is close on a fine grid
    p = contour_nodes(Half.PLUS, 2, 4001)
    exact = (p.nodes[-1] ** 2 - p.nodes[0] ** 2) / 2
    assert abs(np.sum(p.nodes * p.weights) - exact) < 1e-5 * abs(exact) + 1e-12


def test_orientation_plus_runs_left_to_right():
    p = contour_nodes(Half.PLUS, 3, 101)
    assert p.nodes[0].real < 0 < p.nodes[-1].real
    m = p.mirrored()
    assert m.nodes[0].real > 0 > m.nodes[-1].real


@pytest.mark.parametrize("theta_max, count", [(0, 100), (-1, 100), (5, 10)])
def test_bad_contour_arguments(theta_max, count):
    with pytest.raises(ValueError):
        contour_nodes(Half.PLUS, theta_max, count)


def test_real_axis_truncation():
    g = real_axis_nodes(1.0, 1.0)
    assert g.truncation == pytest.approx(math.sqrt(16 * math.log(10)), rel=1e-12)
    assert math.exp(-g.truncation ** 2) <= 1.0000001e-16
    assert real_axis_nodes(1.0, 0.01).truncation == pytest.approx(10 * g.truncation, rel=1e-12)


def test_real_axis_gaussian_integral():
    g = real_axis_nodes(1.0, 1.0)
    assert np.sum(np.exp(-g.nodes ** 2) * g.weights) == pytest.approx(math.sqrt(math.pi), rel=1e-12)


def test_real_axis_spacing_guard():
    g = real_axis_nodes(1.0, 1.0, length=1.0)
    assert g.nodes[1] - g.nodes[0] <= math.pi / 2 + 1e-12


@pytest.mark.parametrize("t", [0.0, -1.0])
def test_real_axis_needs_positive_time(t):
    with pytest.raises(NonPositiveTime):
        real_axis_nodes(1.0, t)
