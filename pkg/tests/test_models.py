import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from smoothmatch.errors import ParameterDomainError
from smoothmatch.models import (
    DOUBLE_WELL_DRIFT,
    DRIFTS,
    OU_DRIFT,
    OuModel,
    ParameterInterval,
    ou_drift,
    ou_stationary_density,
    ou_stationary_density_deriv,
    stationary_ode_residual,
)

PROBES = np.linspace(-3.0, 3.0, 41)


def test_ou_drift_values():
    assert ou_drift(1.0, 2.0) == -2.0
    assert ou_drift(0.0, 5.0) == 0.0
    assert OU_DRIFT.dmu_dtheta(3.0, 7.0) == -3.0
    m, b = OU_DRIFT.linear_decomposition
    assert m(2.5) == -2.5
    assert b(2.5) == 0.0


@pytest.mark.parametrize("drift", list(DRIFTS.values()), ids=list(DRIFTS))
@pytest.mark.parametrize("theta", [0.3, 2.0, 7.5])
def test_linear_decomposition_consistent(drift, theta):
    m, b = drift.linear_decomposition
    np.testing.assert_allclose(drift.mu(PROBES, theta), theta * m(PROBES) + b(PROBES), atol=1e-12, rtol=0)


@pytest.mark.parametrize("drift", list(DRIFTS.values()), ids=list(DRIFTS))
def test_theta_derivatives_match_finite_differences(drift):
    theta, eps = 1.7, 1e-5
    fd = (drift.mu(PROBES, theta + eps) - drift.mu(PROBES, theta - eps)) / (2 * eps)
    np.testing.assert_allclose(drift.dmu_dtheta(PROBES, theta), fd, rtol=1e-6, atol=1e-9)
    fd2 = (drift.dmu_dtheta(PROBES, theta + eps) - drift.dmu_dtheta(PROBES, theta - eps)) / (2 * eps)
    np.testing.assert_allclose(drift.d2mu_dtheta2(PROBES, theta), fd2, atol=1e-9)


def test_stationary_density_at_origin():
    model = OuModel(2.0, 1.0, 0.1)
    assert ou_stationary_density(0.0, model) == pytest.approx(1 / math.sqrt(2 * math.pi * 0.25), rel=1e-14)
    assert ou_stationary_density(0.0, model) == pytest.approx(0.7978845608028654, rel=1e-14)
    assert ou_stationary_density_deriv(0.0, model) == 0.0


def test_stationary_density_integrates_to_one():
    model = OuModel(2.0, 1.3, 0.1)
    sd = math.sqrt(model.stationary_variance)
    x = np.linspace(-10 * sd, 10 * sd, 20001)
    assert np.trapezoid(ou_stationary_density(x, model), x) == pytest.approx(1.0, abs=1e-10)


def test_stationary_variance():
    assert OuModel(2.0, 1.0, 1.0).stationary_variance == 0.25


@pytest.mark.parametrize("field", ["theta", "sigma", "delta"])
@pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
def test_ou_model_rejects_bad_parameters(field, bad):
    kwargs = dict(theta=2.0, sigma=1.0, delta=0.1)
    kwargs[field] = bad
    with pytest.raises(ParameterDomainError):
        OuModel(**kwargs)


def test_parameter_interval():
    space = ParameterInterval(0.05, 20.0)
    assert 2.0 in space and 25.0 not in space
    assert space.clamp(25.0) == (20.0, True)
    assert space.clamp(3.0) == (3.0, False)
    with pytest.raises(ParameterDomainError):
        ParameterInterval(1.0, 1.0)


def test_residual_trivial_cases():
    assert stationary_ode_residual(0.7, 2.0, 0.0, 0.0, OU_DRIFT, 1.0) == 0.0


def test_residual_at_wrong_theta():
    # exact pi' = -(2 theta0 / sigma^2) x pi substituted into the residual at theta = 3
    model = OuModel(2.0, 1.0, 0.1)
    x = 0.5
    pi, dpi = ou_stationary_density(x, model), ou_stationary_density_deriv(x, model)
    r = stationary_ode_residual(x, 3.0, pi, dpi, OU_DRIFT, 1.0)
    assert r == pytest.approx(-0.5 * pi, rel=1e-14)


@settings(max_examples=50, deadline=None)
@given(
    theta=st.floats(0.05, 20.0),
    sigma=st.floats(0.1, 5.0),
)
def test_exact_density_solves_stationary_equation(theta, sigma):
    model = OuModel(theta, sigma, 1.0)
    sd = math.sqrt(model.stationary_variance)
    x = np.linspace(-4 * sd, 4 * sd, 100)
    pi, dpi = ou_stationary_density(x, model), ou_stationary_density_deriv(x, model)
    r = stationary_ode_residual(x, theta, pi, dpi, OU_DRIFT, sigma)
    assert np.max(np.abs(r)) < 1e-12 * max(1.0, np.max(np.abs(theta * x * pi)))


def test_double_well_density_solves_stationary_equation():
    theta, sigma = 1.5, 0.8
    x = np.linspace(-2.0, 2.0, 100)
    c = 2 * theta / sigma**2
    pi = np.exp(c * (x**2 / 2 - x**4 / 4))
    dpi = c * (x - x**3) * pi
    r = stationary_ode_residual(x, theta, pi, dpi, DOUBLE_WELL_DRIFT, sigma)
    assert np.max(np.abs(r)) < 1e-12
