"""Parametric diffusion models dX = mu(X; theta) dt + sigma dW with known constant sigma.

A drift is described by a :class:`DriftSpec` holding the drift function and
its analytic derivatives in the parameter.  Drifts that are linear in the
parameter additionally expose ``mu(x; theta) = theta * m(x) + b(x)`` through
``linear_decomposition``, which enables the closed-form matching estimator.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import ParameterDomainError

ArrayFn = Callable[[np.ndarray], np.ndarray]
DriftFn = Callable[[np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class DriftSpec:
    """Drift mu(x; theta) together with its first two theta-derivatives.

    All callables accept numpy arrays (or scalars) for ``x`` and a scalar
    ``theta`` and broadcast like ufuncs.
    """

    name: str
    mu: DriftFn
    dmu_dtheta: DriftFn
    d2mu_dtheta2: DriftFn
    linear_decomposition: Optional[Tuple[ArrayFn, ArrayFn]] = None

    @property
    def is_linear(self) -> bool:
        return self.linear_decomposition is not None


@dataclass(frozen=True)
class ParameterInterval:
    """Compact parameter space [lo, hi]."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)) or not self.lo < self.hi:
            raise ParameterDomainError(f"need lo < hi, got [{self.lo}, {self.hi}]")

    def __contains__(self, theta: float) -> bool:
        return self.lo <= theta <= self.hi

    def clamp(self, theta: float) -> tuple[float, bool]:
        """Project ``theta`` onto the interval; the flag tells whether it moved."""
        clamped = min(max(theta, self.lo), self.hi)
        return clamped, clamped != theta


#: Parameter space used by the experiments unless overridden.
DEFAULT_THETA_SPACE = ParameterInterval(0.05, 20.0)


@dataclass(frozen=True)
class OuModel:
    """Ornstein-Uhlenbeck process dX = -theta X dt + sigma dW observed every ``delta``."""

    theta: float
    sigma: float
    delta: float

    def __post_init__(self):
        for field in ("theta", "sigma", "delta"):
            value = getattr(self, field)
            if not (np.isfinite(value) and value > 0):
                raise ParameterDomainError(f"{field} must be positive and finite, got {value}")

    @property
    def stationary_variance(self) -> float:
        return self.sigma**2 / (2.0 * self.theta)

    @property
    def ar_coefficient(self) -> float:
        """Lag-one autoregression coefficient exp(-theta * delta)."""
        return float(np.exp(-self.theta * self.delta))

    @property
    def innovation_variance(self) -> float:
        a = self.ar_coefficient
        return self.sigma**2 * (1.0 - a * a) / (2.0 * self.theta)


def _as_float(x):
    # floats pass through untouched: the Euler-Maruyama inner loop calls drifts on scalars
    return x if isinstance(x, (float, np.ndarray)) else np.asarray(x, dtype=float)


def ou_drift(x, theta):
    """Ornstein-Uhlenbeck drift -theta * x."""
    return -theta * _as_float(x)


def _ou_dmu(x, theta):
    return -_as_float(x)


def _zeros(x, theta=None):
    return np.zeros_like(np.asarray(x, dtype=float))


def _neg_identity(x):
    return -_as_float(x)


OU_DRIFT = DriftSpec(
    name="ou",
    mu=ou_drift,
    dmu_dtheta=_ou_dmu,
    d2mu_dtheta2=_zeros,
    linear_decomposition=(_neg_identity, _zeros),
)


def _double_well_m(x):
    x = _as_float(x)
    return x - x**3


def _double_well_mu(x, theta):
    return theta * _double_well_m(x)


def _double_well_dmu(x, theta):
    return _double_well_m(x)


DOUBLE_WELL_DRIFT = DriftSpec(
    name="double_well",
    mu=_double_well_mu,
    dmu_dtheta=_double_well_dmu,
    d2mu_dtheta2=_zeros,
    linear_decomposition=(_double_well_m, _zeros),
)
"""Bistable drift theta * (x - x^3); stationary density is proportional to
exp((2 theta / sigma^2) (x^2/2 - x^4/4))."""

DRIFTS = {spec.name: spec for spec in (OU_DRIFT, DOUBLE_WELL_DRIFT)}


def ou_stationary_density(x, model: OuModel):
    """Gaussian N(0, sigma^2 / (2 theta)) density of the stationary OU law."""
    x = np.asarray(x, dtype=float)
    var = model.stationary_variance
    return np.exp(-0.5 * x * x / var) / np.sqrt(2.0 * np.pi * var)


def ou_stationary_density_deriv(x, model: OuModel):
    """x-derivative of :func:`ou_stationary_density`."""
    x = np.asarray(x, dtype=float)
    return -x / model.stationary_variance * ou_stationary_density(x, model)


def stationary_ode_residual(x, theta, pi, pi_prime, drift: DriftSpec, sigma: float):
    """Residual mu(x; theta) pi(x) - (1/2) [sigma^2 pi(x)]' of the stationary equation.

    With constant dispersion the bracketed derivative is sigma^2 pi'(x).
    Vanishes identically when ``pi`` is the invariant density at ``theta``.
    """
    return drift.mu(x, theta) * pi - 0.5 * sigma**2 * pi_prime
