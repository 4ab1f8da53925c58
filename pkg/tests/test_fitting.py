import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from primecensus import (
    DomainError,
    SingularDesignError,
    fit_hyperbolic_z,
    fit_line,
    fit_log_linear,
    fit_power,
    power_coefficient,
)


def test_log_linear_exact_recovery():
    points = [(x, 2.0 * math.log(x) - 1.0) for x in range(2, 101)]
    fit = fit_log_linear(points)
    assert fit.slope == pytest.approx(2.0, abs=1e-9)
    assert fit.intercept == pytest.approx(-1.0, abs=1e-9)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert fit.n_points == 99
    assert fit.domain == (2.0, 100.0)


def test_log_linear_two_points():
    fit = fit_log_linear([(2, 1.0), (4, 3.0)])
    assert fit.slope == pytest.approx(2.0 / math.log(2), rel=1e-12)
    assert fit.intercept == pytest.approx(-1.0, abs=1e-12)


def test_log_linear_rejects_small_x_and_singular_design():
    with pytest.raises(DomainError):
        fit_log_linear([(1, 0.0), (2, 1.0)])
    with pytest.raises(SingularDesignError):
        fit_log_linear([(5, 1.0), (5, 2.0)])
    with pytest.raises(SingularDesignError):
        fit_log_linear([(5, 1.0)])


def test_line_exact_recovery():
    fit = fit_line([(x, 3.0 * x + 7.0) for x in range(1, 50)])
    assert fit.slope == pytest.approx(3.0, abs=1e-9)
    assert fit.intercept == pytest.approx(7.0, abs=1e-9)


def test_line_collinear_points():
    fit = fit_line([(1, 1.0), (2, 2.0), (3, 3.0)])
    assert fit.slope == pytest.approx(1.0, abs=1e-12)
    assert fit.intercept == pytest.approx(0.0, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0)


def test_power_exact_recovery():
    fit = fit_power([(x, 2.0 * x**3) for x in range(2, 40)])
    assert fit.slope == pytest.approx(3.0, abs=1e-9)
    assert power_coefficient(fit) == pytest.approx(2.0, rel=1e-9)


def test_power_single_decade():
    fit = fit_power([(x, 5.0 * x**2) for x in range(2, 21)])
    assert fit.slope == pytest.approx(2.0, abs=1e-9)
    assert power_coefficient(fit) == pytest.approx(5.0, rel=1e-9)


def test_power_rejects_nonpositive_values():
    with pytest.raises(DomainError):
        fit_power([(2, 1.0), (3, -1.0)])


def test_hyperbolic_z_exact_recovery():
    points = [(x, math.cosh(2.0 * math.log(x) - 1.0)) for x in range(2, 200)]
    fit = fit_hyperbolic_z(points)
    assert fit.slope == pytest.approx(2.0, abs=1e-6)
    assert fit.intercept == pytest.approx(-1.0, abs=1e-6)


def test_hyperbolic_z_domain_and_singular():
    with pytest.raises(DomainError):
        fit_hyperbolic_z([(2, 0.5), (3, 2.0)])
    with pytest.raises(SingularDesignError):
        fit_hyperbolic_z([(7, 2.0), (7, 3.0)])


def test_residuals_orthogonal_to_design(census_1347):
    points = [(r.x, (r.x_squared - r.x) / r.prime_count) for r in census_1347]
    fit = fit_log_linear(points)
    ts = [math.log(x) for x, _ in points]
    residuals = [v - (fit.slope * t + fit.intercept) for (_, v), t in zip(points, ts)]
    scale = max(abs(v) for _, v in points) * len(points)
    assert abs(math.fsum(residuals)) / scale < 1e-8
    assert abs(math.fsum(r * t for r, t in zip(residuals, ts))) / scale < 1e-8


def test_round_trip_from_own_result():
    fit = fit_log_linear([(x, 0.75 * math.log(x) + 4.25) for x in range(2, 300, 3)])
    regenerated = [(x, fit.slope * math.log(x) + fit.intercept) for x in range(2, 300, 3)]
    again = fit_log_linear(regenerated)
    assert again.slope == pytest.approx(fit.slope, rel=1e-12)
    assert again.intercept == pytest.approx(fit.intercept, rel=1e-12)


@given(scale=st.floats(min_value=0.125, max_value=64.0), shift=st.floats(min_value=-8.0, max_value=8.0))
@settings(max_examples=40, deadline=None)
def test_line_fit_is_linear_in_v(scale, shift):
    base = [(x, 1.5 * x + shift) for x in range(1, 30)]
    fit = fit_line(base)
    scaled = fit_line([(x, scale * v) for x, v in base])
    assert scaled.slope == pytest.approx(scale * fit.slope, rel=1e-9, abs=1e-12)
    assert scaled.intercept == pytest.approx(scale * fit.intercept, rel=1e-9, abs=1e-9)
