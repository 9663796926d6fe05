import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.polynomial import Polynomial

from smoothmatch.errors import ConfigurationError, ParameterDomainError
from smoothmatch.kde import (
    DensityEstimate,
    QuadratureGrid,
    biweight4_kernel,
    empirical_wise,
    kde_deriv_eval,
    kde_eval,
    kernel_moment,
    default_weight,
    validate_kernel,
    weight_lambda,
    weight_lambda_deriv,
)
from smoothmatch.models import OuModel, ou_stationary_density, ou_stationary_density_deriv
from smoothmatch.simulate import SeedSpec, TimeSeriesSample, sample_ou_exact

K = biweight4_kernel()
# (105/64 - 315/64 u^2)(1 - u^2)^2 as an exact polynomial
K_POLY = Polynomial([105 / 64, 0, -315 / 64]) * Polynomial([1, 0, -1]) ** 2


def exact_moment(l):
    antider = (Polynomial.basis(l) * K_POLY).integ()
    return antider(1.0) - antider(-1.0)


def test_kernel_values():
    assert K.eval(0.0) == 1.640625
    assert K.eval(1.0) == 0.0 and K.eval(-1.0) == 0.0
    assert K.eval(1.3) == 0.0 and K.deriv(-1.3) == 0.0


def test_kernel_matches_polynomial_on_support():
    u = np.linspace(-1, 1, 101)
    np.testing.assert_allclose(K.eval(u), K_POLY(u), atol=1e-14)
    np.testing.assert_allclose(K.deriv(u), K_POLY.deriv()(u), atol=1e-13)


def test_kernel_is_even():
    u = np.linspace(0, 1.2, 50)
    np.testing.assert_array_equal(K.eval(u), K.eval(-u))


def test_kernel_derivative_finite_differences():
    u = np.linspace(-0.99, 0.99, 199)
    eps = 1e-6
    fd = (K.eval(u + eps) - K.eval(u - eps)) / (2 * eps)
    np.testing.assert_allclose(K.deriv(u), fd, atol=1e-6)


def test_fourth_moment_oracle():
    assert exact_moment(4) == pytest.approx(-1 / 33, abs=1e-15)


@pytest.mark.parametrize("l", range(9))
def test_kernel_moments_against_exact_integration(l):
    assert kernel_moment(K, l) == pytest.approx(exact_moment(l), abs=1e-12)


def test_kernel_moment_suite():
    expected = [1.0, 0.0, 0.0, 0.0, -1 / 33]
    for l, value in enumerate(expected):
        assert abs(kernel_moment(K, l) - value) < 1e-9
    validate_kernel(K)


def test_kernel_moment_order_limit():
    with pytest.raises(ConfigurationError):
        kernel_moment(K, 9)


def test_weight_lambda_values():
    assert weight_lambda(0.0, 0.7, 0.5) == 1.0
    assert weight_lambda(1.2, 0.7, 0.5) == 0.0
    assert weight_lambda(-1.0, 0.7, 0.5) == 0.0
    expected = math.exp(-0.5 * math.exp(-0.5 / 0.15**2) / 0.15**2)
    value = weight_lambda(0.85, 0.7, 0.5)
    assert value == pytest.approx(expected, rel=1e-14)
    assert 0.0 < value < 1.0


def test_weight_lambda_rejects_bad_constants():
    with pytest.raises(ParameterDomainError):
        weight_lambda(0.0, 1.0, 0.5)
    with pytest.raises(ParameterDomainError):
        weight_lambda(0.0, 0.7, 0.0)


def test_weight_lambda_derivative_finite_differences():
    x = np.linspace(-0.995, 0.995, 400)
    eps = 1e-7
    fd = (weight_lambda(x + eps) - weight_lambda(x - eps)) / (2 * eps)
    np.testing.assert_allclose(weight_lambda_deriv(x), fd, atol=1e-5)


def test_default_weight_probes():
    w = default_weight()
    assert w.support == (-1.4, 1.4)
    assert w.eval(0.9) == 1.0
    assert w.eval(1.5) == 0.0
    x = np.linspace(-2, 2, 801)
    np.testing.assert_array_equal(w.eval(x), w.eval(-x))
    assert np.all(w.eval(x) >= 0)
    assert np.all(w.eval(x[np.abs(x) >= 1.4]) == 0)
    assert np.all(w.eval(x[np.abs(x) <= 0.98]) == 1)
    assert np.all(w.deriv(x[np.abs(x) <= 0.98]) == 0)


def test_default_weight_derivative_chain_rule():
    w = default_weight()
    x = np.linspace(-1.39, 1.39, 300)
    eps = 1e-7
    fd = (w.eval(x + eps) - w.eval(x - eps)) / (2 * eps)
    np.testing.assert_allclose(w.deriv(x), fd, atol=1e-5)


def _sample(values, delta=0.1):
    return TimeSeriesSample(delta, np.asarray(values, dtype=float))


def test_kde_single_observation():
    d = DensityEstimate(_sample([0.0]), 1.0, K)
    assert kde_eval(d, 0.0) == 1.640625
    assert kde_eval(d, 1.5) == 0.0


def test_kde_outside_support_is_zero():
    d = DensityEstimate(_sample([-0.3, 0.1, 0.4]), 0.2, K)
    assert kde_eval(d, 5.0) == 0.0
    assert kde_deriv_eval(d, -5.0) == 0.0


def test_kde_symmetric_sample_has_flat_origin():
    for h in (0.3, 1.0, 2.5):
        assert kde_deriv_eval(DensityEstimate(_sample([-1.0, 1.0]), h, K), 0.0) == 0.0


def test_bandwidth_must_be_positive():
    with pytest.raises(ParameterDomainError):
        DensityEstimate(_sample([0.0]), 0.0, K)


def _hull_integral(d, fn):
    # the estimate is polynomial between consecutive points Z_j +- h, so
    # Gauss-Legendre on each piece is exact up to rounding
    z = d.sample.values
    knots = np.unique(np.concatenate([z - d.bandwidth, z + d.bandwidth]))
    nodes, weights = np.polynomial.legendre.leggauss(8)
    total = 0.0
    for a, b in zip(knots[:-1], knots[1:]):
        x = 0.5 * (a + b) + 0.5 * (b - a) * nodes
        total += 0.5 * (b - a) * np.dot(weights, fn(x))
    return total


samples = st.lists(st.floats(-3, 3, allow_nan=False), min_size=1, max_size=40)


@settings(max_examples=30, deadline=None)
@given(values=samples, h=st.floats(0.05, 2.0))
def test_kde_has_unit_mass(values, h):
    d = DensityEstimate(_sample(values), h, K)
    assert abs(_hull_integral(d, d.pdf) - 1.0) < 1e-6


@settings(max_examples=30, deadline=None)
@given(values=samples, h=st.floats(0.05, 2.0))
def test_kde_derivative_integrates_to_zero(values, h):
    d = DensityEstimate(_sample(values), h, K)
    assert abs(_hull_integral(d, d.pdf_deriv)) < 1e-6


@settings(max_examples=30, deadline=None)
@given(values=samples, h=st.floats(0.05, 2.0), shift=st.floats(-5, 5), x=st.floats(-3, 3))
def test_kde_translation_equivariance(values, h, shift, x):
    z = np.asarray(values)
    a = kde_eval(DensityEstimate(_sample(z), h, K), x)
    b = kde_eval(DensityEstimate(_sample(z + shift), h, K), x + shift)
    assert abs(a - b) < 1e-12


def test_kde_derivative_matches_finite_differences():
    s = sample_ou_exact(OuModel(2.0, 1.0, 0.1), 199, SeedSpec(17))
    d = DensityEstimate(s, 0.3, K)
    x = np.linspace(-1.0, 1.0, 50)
    eps = 1e-5
    fd = (d.pdf(x + eps) - d.pdf(x - eps)) / (2 * eps)
    np.testing.assert_allclose(d.pdf_deriv(x), fd, rtol=1e-5, atol=1e-8)


def test_kde_can_be_negative():
    # two distant spikes: the order-4 kernel dips below zero at the edges
    d = DensityEstimate(_sample([0.0]), 1.0, K)
    assert kde_eval(d, 0.8) < 0.0


@pytest.mark.parametrize("h", [0.01, 0.07, 0.3, 1.1])
def test_grid_scatter_matches_direct_sum(h):
    s = sample_ou_exact(OuModel(2.0, 1.0, 0.1), 150, SeedSpec(5))
    d = DensityEstimate(s, h, K)
    grid = QuadratureGrid(-1.4, 1.4, 2001)
    pi, dpi = d.on_grid(grid)
    np.testing.assert_allclose(pi, d.pdf(grid.x), atol=1e-12)
    np.testing.assert_allclose(dpi, d.pdf_deriv(grid.x), atol=1e-10)


def test_grid_scatter_handles_far_samples():
    d = DensityEstimate(_sample([10.0, 12.0]), 0.5, K)
    pi, dpi = d.on_grid(QuadratureGrid(-1.4, 1.4, 101))
    assert not pi.any() and not dpi.any()


def test_grid_evaluation_is_parallel_safe():
    from concurrent.futures import ThreadPoolExecutor

    s = sample_ou_exact(OuModel(2.0, 1.0, 0.1), 199, SeedSpec(6))
    d = DensityEstimate(s, 0.2, K)
    x = np.linspace(-1.4, 1.4, 2001)
    chunks = np.array_split(x, 8)
    with ThreadPoolExecutor(4) as pool:
        parts = list(pool.map(d.pdf, chunks))
    np.testing.assert_array_equal(np.concatenate(parts), d.pdf(x))


def test_empirical_wise_zero_and_nonnegative():
    s = sample_ou_exact(OuModel(2.0, 1.0, 0.1), 99, SeedSpec(3))
    d = DensityEstimate(s, 0.25, K)
    w = default_weight()
    grid = QuadratureGrid.for_weight(w)
    assert empirical_wise(d, d.pdf, d.pdf_deriv, w, grid) == pytest.approx((0.0, 0.0), abs=1e-20)
    model = OuModel(2.0, 1.0, 0.1)
    a, b = empirical_wise(
        d, lambda x: ou_stationary_density(x, model), lambda x: ou_stationary_density_deriv(x, model), w, grid
    )
    assert a > 0 and b > 0


def test_empirical_wise_requires_covering_grid():
    d = DensityEstimate(_sample([0.0]), 0.25, K)
    with pytest.raises(ConfigurationError):
        empirical_wise(d, d.pdf, d.pdf_deriv, default_weight(), QuadratureGrid(-1.0, 1.0, 101))


def test_empirical_wise_decreases_with_n():
    model = OuModel(2.0, 1.0, 0.1)
    w = default_weight()
    grid = QuadratureGrid.for_weight(w)

    def median_ise(n):
        out = []
        for seed in range(15):
            s = sample_ou_exact(model, n - 1, SeedSpec(1000 + seed))
            d = DensityEstimate(s, n ** (-1 / 8), K)
            out.append(
                empirical_wise(
                    d, lambda x: ou_stationary_density(x, model), lambda x: ou_stationary_density_deriv(x, model), w, grid
                )[0]
            )
        return np.median(out)

    assert median_ise(3200) < median_ise(200)


def test_quadrature_grid():
    g = QuadratureGrid(-1.0, 1.0, 101)
    assert g.step == pytest.approx(0.02)
    assert g.integrate(np.ones(101)) == pytest.approx(2.0)
    assert g.refined().nodes == 201
    with pytest.raises(ConfigurationError):
        QuadratureGrid(1.0, 1.0)
