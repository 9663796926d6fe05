"""Competing estimators for the Ornstein-Uhlenbeck benchmark.

The OU transition law over a step ``delta`` is Gaussian with mean
``a * x`` and variance ``v``, where

    a = exp(-theta * delta),    v = sigma^2 (1 - a^2) / (2 theta),

and the stationary law is N(0, sigma^2 / (2 theta)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSampleError, ParameterDomainError, SingularStepError
from .models import DEFAULT_THETA_SPACE, ParameterInterval
from .simulate import TimeSeriesSample
from .smatch import scan_and_refine

_LOG_2PI = math.log(2.0 * math.pi)


def kessler_estimator(sample: TimeSeriesSample, sigma: float = 1.0) -> float:
    """Moment estimator sigma^2 n / (2 sum_{j<n} Z_j^2); the last observation is unused."""
    z = sample.values[:-1]
    total = float(np.dot(z, z))
    if not total > 0:
        raise DegenerateSampleError("sum of squares is zero")
    return sigma**2 * z.size / (2.0 * total)


def _transition_terms(theta: float, sigma: float, delta: float):
    """a, a', a'', v, v', v'' as functions of theta."""
    a = math.exp(-theta * delta)
    one_minus_a2 = -math.expm1(-2.0 * theta * delta)
    a2 = a * a
    s2 = sigma * sigma
    v = s2 * one_minus_a2 / (2.0 * theta)
    dv = s2 * (delta * a2 / theta - one_minus_a2 / (2.0 * theta**2))
    d2v = s2 * (-2.0 * delta**2 * a2 / theta - 2.0 * delta * a2 / theta**2 + one_minus_a2 / theta**3)
    return a, -delta * a, delta * delta * a, v, dv, d2v


@dataclass(frozen=True, eq=False)
class LikelihoodParts:
    """Exact OU log-likelihood of a sample with its score and score derivative.

    Set ``include_stationary_term=False`` to drop log pi(Z_0; theta) and keep
    only the transition densities.
    """

    sample: TimeSeriesSample
    sigma: float = 1.0
    include_stationary_term: bool = True

    def __post_init__(self):
        z = self.sample.values
        x, y = z[:-1], z[1:]
        object.__setattr__(self, "_sums", (float(x @ x), float(x @ y), float(y @ y), float(z[0] ** 2)))

    def _check(self, theta):
        if not (math.isfinite(theta) and theta > 0):
            raise ParameterDomainError(f"theta must be positive, got {theta}")

    def _residual_sums(self, a):
        sxx, sxy, syy, _ = self._sums
        return syy - 2.0 * a * sxy + a * a * sxx, sxy - a * sxx

    def loglik(self, theta: float) -> float:
        self._check(theta)
        n = self.sample.n
        a, _, _, v, _, _ = _transition_terms(theta, self.sigma, self.sample.delta)
        see, _ = self._residual_sums(a)
        out = -0.5 * n * (_LOG_2PI + math.log(v)) - see / (2.0 * v)
        if self.include_stationary_term:
            out += self.stationary_term(theta)
        return out

    def stationary_term(self, theta: float) -> float:
        """log N(Z_0; 0, sigma^2 / (2 theta))."""
        z0sq = self._sums[3]
        var = self.sigma**2 / (2.0 * theta)
        return -0.5 * (_LOG_2PI + math.log(var)) - z0sq / (2.0 * var)

    def score(self, theta: float) -> float:
        self._check(theta)
        n = self.sample.n
        a, da, _, v, dv, _ = _transition_terms(theta, self.sigma, self.sample.delta)
        see, sex = self._residual_sums(a)
        out = -0.5 * n * dv / v + da * sex / v + dv * see / (2.0 * v * v)
        if self.include_stationary_term:
            out += 0.5 / theta - self._sums[3] / self.sigma**2
        return out

    def score_deriv(self, theta: float) -> float:
        self._check(theta)
        n = self.sample.n
        sxx = self._sums[0]
        a, da, d2a, v, dv, d2v = _transition_terms(theta, self.sigma, self.sample.delta)
        see, sex = self._residual_sums(a)
        out = (
            n * (-0.5 * d2v / v + 0.5 * dv * dv / (v * v))
            + (-da * da * sxx + d2a * sex) / v
            - 2.0 * da * dv * sex / (v * v)
            + see * (0.5 * d2v / (v * v) - dv * dv / v**3)
        )
        if self.include_stationary_term:
            out -= 0.5 / theta**2
        return out


def ou_loglik(theta: float, sample: TimeSeriesSample, sigma: float = 1.0, include_stationary_term: bool = True) -> float:
    return LikelihoodParts(sample, sigma, include_stationary_term).loglik(theta)


def ou_mle(
    sample: TimeSeriesSample,
    sigma: float = 1.0,
    space: ParameterInterval = DEFAULT_THETA_SPACE,
    include_stationary_term: bool = True,
) -> float:
    """Maximum likelihood estimate over ``space`` (coarse scan, then golden section)."""
    if space.lo <= 0:
        raise ParameterDomainError("parameter space must lie in (0, inf)")
    parts = LikelihoodParts(sample, sigma, include_stationary_term)
    theta, _ = scan_and_refine(lambda t: -parts.loglik(t), space)
    if space.lo < theta < space.hi:
        # value comparisons stall near sqrt(eps) relative; finish on the score
        slope = parts.score_deriv(theta)
        if slope < 0:
            polished = theta - parts.score(theta) / slope
            if abs(polished - theta) <= 1e-6 and polished in space:
                theta = polished
    return theta


@dataclass(frozen=True)
class OneStepResult:
    theta_bar: float
    preliminary: float
    newton_increment: float
    clamped: bool = False


def one_step(
    preliminary: float,
    sample: TimeSeriesSample,
    sigma: float = 1.0,
    parts: LikelihoodParts | None = None,
    space: ParameterInterval = DEFAULT_THETA_SPACE,
) -> OneStepResult:
    """One Newton-Raphson step on the score starting from ``preliminary``.

    The result is projected onto ``space``; ``newton_increment`` is the step
    actually taken, so ``theta_bar == preliminary + newton_increment``.
    """
    parts = parts or LikelihoodParts(sample, sigma)
    slope = parts.score_deriv(preliminary)
    if not abs(slope) > 1e-12:
        raise SingularStepError(f"score derivative {slope:.3e} at theta={preliminary}")
    raw = preliminary - parts.score(preliminary) / slope
    theta_bar, clamped = space.clamp(raw)
    return OneStepResult(theta_bar, preliminary, theta_bar - preliminary, clamped)


def ou_fisher_information(theta: float, sigma: float, delta: float) -> float:
    """Fisher information about theta carried by one stationary transition."""
    if min(theta, sigma, delta) <= 0:
        raise ParameterDomainError("theta, sigma and delta must be positive")
    _, da, _, v, dv, _ = _transition_terms(theta, sigma, delta)
    second_moment = sigma**2 / (2.0 * theta)
    return second_moment * da * da / v + dv * dv / (2.0 * v * v)


def efficiency_bound(theta: float, sigma: float, delta: float, n_plus_1: int) -> float:
    """Asymptotic lower bound 1 / ((n+1) I) on the mean squared error."""
    if n_plus_1 <= 0:
        raise ParameterDomainError("n_plus_1 must be positive")
    return 1.0 / (n_plus_1 * ou_fisher_information(theta, sigma, delta))
