import numpy as np
import pytest

from app.core.errors import QuadratureError, SingularError
from app.core.quadrature import bridge_gaps, integrate_halfline, integrate_interval, integrate_ssf_kernel


def test_halfline_rational():
    result = integrate_halfline(lambda t: 1.0 / (1.0 + t * t))
    assert result.converged
    error = abs(result.value - np.pi / 2)
    assert error <= 1e-11
    assert error <= result.abs_error_estimate + 1e-15


def test_halfline_exponential():
    result = integrate_halfline(lambda t: np.exp(-t))
    assert abs(result.value - 1.0) <= 1e-11
    assert abs(result.value - 1.0) <= result.abs_error_estimate + 1e-15


def test_scalar_log_through_resolvent_integral():
    result = integrate_halfline(lambda t: 1.0 / (1j + 1j * t) - 1.0 / (1.0 + 1j * t))
    assert -1j * result.value == pytest.approx(1j * np.pi / 2, abs=1e-11)


def test_matrix_valued_integrand():
    result = integrate_interval(lambda x: np.diag([x, x * x]), 0.0, 1.0)
    np.testing.assert_allclose(result.value, np.diag([0.5, 1.0 / 3.0]), atol=1e-14)


def test_interval_refuses_empty_range_and_gives_up():
    with pytest.raises(QuadratureError):
        integrate_interval(lambda x: x, 1.0, 1.0)
    with pytest.raises(QuadratureError):
        integrate_interval(lambda x: 1.0 / np.sqrt(x), 0.0, 1.0, tol=1e-14, max_subdivisions=3)


def test_ssf_kernel_constant():
    result = integrate_ssf_kernel(lambda t: 0.5, 1j)
    assert abs(result.value) <= 1e-8


def test_ssf_kernel_zero_is_exact():
    assert integrate_ssf_kernel(lambda t: 0.0, 2 + 1j).value == 0


@pytest.mark.parametrize("z", [1j, 1 + 2j, -0.5 - 1j])
def test_ssf_kernel_step_function(z):
    theta = 0.3
    result = integrate_ssf_kernel(lambda t: 1.0 if t < theta else 0.0, z, breakpoints=[theta])
    expected = 1.0 / (theta - z)
    assert abs(result.value - expected) <= 1e-6
    assert abs(result.value - expected) <= result.abs_error_estimate


def test_ssf_kernel_step_without_breakpoint():
    result = integrate_ssf_kernel(lambda t: 1.0 if t < 0.3 else 0.0, 1j)
    assert abs(result.value - 1.0 / (0.3 - 1j)) <= 1e-6


def test_undefined_node_is_bridged():
    def ssf(t):
        if t == 0.375:
            raise SingularError("undefined")
        return 0.5

    result = integrate_ssf_kernel(ssf, 1j)
    assert result.skipped_points == [0.375]
    assert abs(result.value) <= 1e-8


def test_too_many_undefined_nodes():
    def ssf(t):
        if t == 0.375:
            raise SingularError("undefined")
        return 0.5

    with pytest.raises(QuadratureError):
        integrate_ssf_kernel(ssf, 1j, max_skips=0)


def test_gap_takes_midpoint_of_defined_neighbours():
    assert bridge_gaps([1.0, None, 3.0]) == [1.0, 2.0, 3.0]
    assert bridge_gaps([None, None, 4.0, None, 0.0]) == [4.0, 4.0, 4.0, 2.0, 0.0]
    assert bridge_gaps([0.5, None]) == [0.5, 0.5]
    with pytest.raises(QuadratureError):
        bridge_gaps([None, None])


def test_undefined_cluster_bridged_from_panel_neighbours():
    # undefined on a tiny interval around a node, defined at the other nodes of its panel
    def ssf(t):
        if abs(t - 0.375) < 1e-6:
            raise SingularError("undefined")
        return min(max(t, 0.0), 1.0)

    bridged = integrate_ssf_kernel(ssf, 1j)
    reference = integrate_ssf_kernel(lambda t: min(max(t, 0.0), 1.0), 1j)
    assert bridged.skipped_points == [0.375]
    assert abs(bridged.value - reference.value) <= 1e-10


def test_undefined_neighbourhood_raises():
    def ssf(t):
        raise SingularError("undefined everywhere")

    with pytest.raises(QuadratureError):
        integrate_ssf_kernel(ssf, 1j)


def test_repeat_runs_are_bitwise_identical():
    def ssf(t):
        return 0.5 + 0.5 * np.tanh(t)

    first = integrate_ssf_kernel(ssf, 0.5 + 1j)
    second = integrate_ssf_kernel(ssf, 0.5 + 1j)
    assert first.value == second.value
    assert first.evaluations == second.evaluations
