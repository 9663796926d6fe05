"""Matching step: the weighted stationary-equation criterion and its minimizers.

For a density estimate pi_hat the criterion is

    R_n(theta) = integral of (mu(x; theta) pi_hat(x) - (sigma^2 / 2) pi_hat'(x))^2 w(x) dx

evaluated by the composite trapezoid rule on a uniform grid over the support
of ``w``.  The estimate is its minimizer over a compact parameter interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigurationError, DegenerateSampleError
from .kde import DensityEstimate, Kernel, QuadratureGrid, WeightFunction, biweight4_kernel, default_weight
from .models import DEFAULT_THETA_SPACE, OU_DRIFT, DriftSpec, ParameterInterval, stationary_ode_residual
from .simulate import TimeSeriesSample

DENOMINATOR_FLOOR = 1e-14
COARSE_POINTS = 64
GOLDEN_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class CriterionContext:
    """Everything the criterion needs, with the density tabulated on the grid."""

    pi: np.ndarray
    pi_prime: np.ndarray
    drift: DriftSpec
    sigma: float
    weight: WeightFunction
    grid: QuadratureGrid
    bandwidth: float = math.nan

    def __post_init__(self):
        lo, hi = self.weight.support
        if not (math.isclose(self.grid.lo, lo) and math.isclose(self.grid.hi, hi)):
            raise ConfigurationError("quadrature grid must span the weight support exactly")
        if self.grid.nodes < 101 or self.grid.nodes % 2 == 0:
            raise ConfigurationError("grid node count must be odd and >= 101")
        pi = np.array(self.pi, dtype=float)
        dpi = np.array(self.pi_prime, dtype=float)
        if pi.shape != self.grid.x.shape or dpi.shape != self.grid.x.shape:
            raise ConfigurationError("density values must be tabulated on the grid")
        wx = np.asarray(self.weight.eval(self.grid.x), dtype=float)
        for arr in (pi, dpi, wx):
            arr.setflags(write=False)
        object.__setattr__(self, "pi", pi)
        object.__setattr__(self, "pi_prime", dpi)
        object.__setattr__(self, "w", wx)

    @classmethod
    def from_density(
        cls,
        density: DensityEstimate,
        drift: DriftSpec = OU_DRIFT,
        sigma: float = 1.0,
        weight: WeightFunction | None = None,
        grid: QuadratureGrid | None = None,
    ) -> "CriterionContext":
        weight = weight or default_weight()
        grid = grid or QuadratureGrid.for_weight(weight)
        pi, dpi = density.on_grid(grid)
        return cls(pi, dpi, drift, sigma, weight, grid, bandwidth=density.bandwidth)

    @classmethod
    def from_functions(
        cls,
        pi: Callable,
        pi_prime: Callable,
        drift: DriftSpec = OU_DRIFT,
        sigma: float = 1.0,
        weight: WeightFunction | None = None,
        grid: QuadratureGrid | None = None,
    ) -> "CriterionContext":
        """Plug in a known density, e.g. the exact stationary law."""
        weight = weight or default_weight()
        grid = grid or QuadratureGrid.for_weight(weight)
        return cls(pi(grid.x), pi_prime(grid.x), drift, sigma, weight, grid)

    def with_weight(self, weight: WeightFunction) -> "CriterionContext":
        return CriterionContext(self.pi, self.pi_prime, self.drift, self.sigma, weight, self.grid, self.bandwidth)


@dataclass(frozen=True)
class SmEstimate:
    theta_hat: float
    bandwidth: float
    criterion_value: float
    method: str
    clamped: bool = False
    diagnostics: dict = field(default_factory=dict, compare=False)


def criterion(ctx: CriterionContext, theta: float) -> float:
    """R_n(theta); always >= 0."""
    x = ctx.grid.x
    r = stationary_ode_residual(x, theta, ctx.pi, ctx.pi_prime, ctx.drift, ctx.sigma)
    return ctx.grid.integrate(r * r * ctx.w)


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(f: Callable[[float], float], lo: float, hi: float, tol: float = GOLDEN_TOL) -> tuple[float, float]:
    """Minimize ``f`` on [lo, hi]; returns ``(argmin, min)``.

    The bracket end points compete with the interior result, the lower end
    first, so a flat function yields ``lo``.
    """
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    fx = f(x)
    for end in (lo, hi):
        fe = f(end)
        if fe <= fx:
            return end, fe
    return x, fx


def scan_and_refine(
    f: Callable[[float], float], space: ParameterInterval, points: int = COARSE_POINTS, tol: float = GOLDEN_TOL
) -> tuple[float, float]:
    """Coarse scan on ``points`` equispaced values, then golden section around the best.

    Ties in the scan go to the smaller parameter.
    """
    thetas = np.linspace(space.lo, space.hi, points)
    values = np.array([f(float(t)) for t in thetas])
    i = int(np.argmin(values))
    lo = float(thetas[max(i - 1, 0)])
    hi = float(thetas[min(i + 1, points - 1)])
    x, fx = golden_section(f, lo, hi, tol)
    if values[i] <= fx:
        return float(thetas[i]), float(values[i])
    return x, fx


def criterion_derivatives(ctx: CriterionContext, theta: float) -> tuple[float, float]:
    """First and second theta-derivatives of the criterion."""
    x = ctx.grid.x
    r = stationary_ode_residual(x, theta, ctx.pi, ctx.pi_prime, ctx.drift, ctx.sigma)
    dr = ctx.drift.dmu_dtheta(x, theta) * ctx.pi
    d2r = ctx.drift.d2mu_dtheta2(x, theta) * ctx.pi
    first = 2.0 * ctx.grid.integrate(r * dr * ctx.w)
    second = 2.0 * ctx.grid.integrate((dr * dr + r * d2r) * ctx.w)
    return first, second


def minimize_criterion(ctx: CriterionContext, space: ParameterInterval = DEFAULT_THETA_SPACE) -> SmEstimate:
    """Minimize the criterion by coarse scan plus golden section.

    Comparing criterion values cannot locate the minimizer more finely than
    about sqrt(eps * R / R''), so an interior result gets one Newton step on
    the analytic derivative, kept only if it stays within 1e-6 of the
    golden-section point.
    """
    theta, value = scan_and_refine(lambda t: criterion(ctx, t), space)
    if space.lo < theta < space.hi:
        first, second = criterion_derivatives(ctx, theta)
        if second > 0:
            polished = theta - first / second
            if abs(polished - theta) <= 1e-6 and polished in space:
                theta, value = polished, criterion(ctx, polished)
    return SmEstimate(theta, ctx.bandwidth, max(value, 0.0), "grid+golden-section")


def _weighted_least_squares(ctx: CriterionContext, m: np.ndarray, b: np.ndarray, space: ParameterInterval) -> SmEstimate:
    # residual is theta * m * pi + g with g = b * pi - (sigma^2/2) pi'
    g = b * ctx.pi - 0.5 * ctx.sigma**2 * ctx.pi_prime
    mp = m * ctx.pi
    den = ctx.grid.integrate(mp * mp * ctx.w)
    if not den >= DENOMINATOR_FLOOR:
        raise DegenerateSampleError(f"closed-form denominator {den:.3e} below {DENOMINATOR_FLOOR}")
    num = ctx.grid.integrate(mp * g * ctx.w)
    raw = -num / den
    theta, clamped = space.clamp(raw)
    return SmEstimate(
        theta,
        ctx.bandwidth,
        max(criterion(ctx, theta), 0.0),
        "closed-form",
        clamped,
        {"unclamped": raw},
    )


def generic_linear_closed_form(ctx: CriterionContext, space: ParameterInterval = DEFAULT_THETA_SPACE) -> SmEstimate:
    """Exact minimizer for drifts theta * m(x) + b(x), clamped to ``space``."""
    if ctx.drift.linear_decomposition is None:
        raise ConfigurationError(f"drift {ctx.drift.name!r} is not linear in theta")
    m_fn, b_fn = ctx.drift.linear_decomposition
    x = ctx.grid.x
    return _weighted_least_squares(ctx, np.asarray(m_fn(x), float), np.asarray(b_fn(x), float), space)


def ou_closed_form(ctx: CriterionContext, space: ParameterInterval = DEFAULT_THETA_SPACE) -> SmEstimate:
    """-(sigma^2/2) * int x pi pi' w / int x^2 pi^2 w, clamped to ``space``."""
    x = ctx.grid.x
    den = ctx.grid.integrate(x * x * ctx.pi * ctx.pi * ctx.w)
    if not den >= DENOMINATOR_FLOOR:
        raise DegenerateSampleError(f"closed-form denominator {den:.3e} below {DENOMINATOR_FLOOR}")
    num = ctx.grid.integrate(x * ctx.pi * ctx.pi_prime * ctx.w)
    raw = -0.5 * ctx.sigma**2 * num / den
    theta, clamped = space.clamp(raw)
    return SmEstimate(theta, ctx.bandwidth, max(criterion(ctx, theta), 0.0), "closed-form", clamped, {"unclamped": raw})


# -- bandwidth selection ------------------------------------------------------


def default_bandwidth(sample: TimeSeriesSample) -> float:
    """Sample standard deviation times (n+1)^(-1/8)."""
    sd = float(np.std(sample.values, ddof=1)) if len(sample) > 1 else 0.0
    if not sd > 0:
        raise DegenerateSampleError("sample has zero spread")
    return sd * len(sample) ** (-1.0 / 8.0)


def bandwidth_grid(sample: TimeSeriesSample, ratio: float = 0.9, count: int = 30) -> np.ndarray:
    """Geometric, strictly decreasing bandwidths h_max * ratio**i."""
    return default_bandwidth(sample) * ratio ** np.arange(count)


def quasi_optimal_bandwidth(
    sample: TimeSeriesSample,
    estimator: Callable[[float], float],
    h_grid: Sequence[float] | None = None,
) -> tuple[float, float]:
    """Pick the bandwidth whose estimate changes least at the next (smaller) bandwidth.

    Returns ``(h, theta_h)``; ties favor the larger bandwidth.
    """
    hs = bandwidth_grid(sample) if h_grid is None else np.asarray(h_grid, dtype=float)
    if hs.size < 3:
        raise ConfigurationError("quasi-optimality needs at least 3 bandwidths")
    if np.any(np.diff(hs) >= 0):
        raise ConfigurationError("bandwidth grid must be strictly decreasing")
    thetas = np.array([estimator(float(h)) for h in hs])
    i = int(np.argmin(np.abs(np.diff(thetas))))
    return float(hs[i]), float(thetas[i])


def sm_estimator(
    sample: TimeSeriesSample,
    sigma: float = 1.0,
    drift: DriftSpec = OU_DRIFT,
    space: ParameterInterval = DEFAULT_THETA_SPACE,
    kernel: Kernel | None = None,
    weight: WeightFunction | None = None,
    grid: QuadratureGrid | None = None,
    bandwidth: float | None = None,
    h_grid: Sequence[float] | None = None,
) -> SmEstimate:
    """Smooth-and-match estimate with a fixed or quasi-optimal bandwidth.

    Drifts linear in theta use the weighted least-squares closed form; any
    other drift goes through :func:`minimize_criterion`.
    """
    kernel = kernel or biweight4_kernel()
    weight = weight or default_weight()
    grid = grid or QuadratureGrid.for_weight(weight)

    def fit(h: float) -> SmEstimate:
        ctx = CriterionContext.from_density(DensityEstimate(sample, h, kernel), drift, sigma, weight, grid)
        if drift.is_linear:
            return generic_linear_closed_form(ctx, space)
        return minimize_criterion(ctx, space)

    if bandwidth is not None:
        return fit(bandwidth)
    fits: dict[float, SmEstimate] = {}

    def theta_at(h: float) -> float:
        fits[h] = fit(h)
        return fits[h].theta_hat

    h_hat, _ = quasi_optimal_bandwidth(sample, theta_at, h_grid)
    return fits[h_hat]
