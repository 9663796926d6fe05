"""Smoothing step: kernels, weight functions and kernel density estimates.

The density estimate of a sample Z_0..Z_n with bandwidth h is

    pi_hat(x)  = 1 / ((n+1) h)   * sum_j K((x - Z_j) / h)
    pi_hat'(x) = 1 / ((n+1) h^2) * sum_j K'((x - Z_j) / h)

Higher-order kernels take negative values, so ``pi_hat`` may be negative;
it is never clipped.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigurationError, ParameterDomainError
from .simulate import TimeSeriesSample

ArrayFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Kernel:
    """Symmetric kernel supported on [-support_halfwidth, support_halfwidth].

    ``eval`` and ``deriv`` must be vectorized and return zero off the support.
    """

    name: str
    eval: ArrayFn
    deriv: ArrayFn
    declared_order: int
    support_halfwidth: float = 1.0


_B4 = 105.0 / 64.0


def _biweight4(u):
    u = np.asarray(u, dtype=float)
    u2 = u * u
    t = np.maximum(1.0 - u2, 0.0)
    return _B4 * t * t * (1.0 - 3.0 * u2)


def _biweight4_deriv(u):
    u = np.asarray(u, dtype=float)
    u2 = u * u
    t = np.maximum(1.0 - u2, 0.0)
    return (2.0 * _B4) * u * t * (9.0 * u2 - 5.0)


def biweight4_kernel() -> Kernel:
    """Fourth-order polynomial kernel (105/64 - 315/64 u^2)(1 - u^2)^2 on |u| <= 1."""
    return Kernel("biweight4", _biweight4, _biweight4_deriv, declared_order=4)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def kernel_moment(k: Kernel, l: int, panels: int = 256) -> float:
    """Integral of u^l K(u) over the kernel support.

    Composite 8-point Gauss-Legendre on ``panels`` equal panels (2048 nodes by
    default); exact up to rounding for polynomial kernels of degree <= 15 - l.
    """
    if not 0 <= l <= 8:
        raise ConfigurationError(f"moment order must be in 0..8, got {l}")
    a = k.support_halfwidth
    edges = np.linspace(-a, a, panels + 1)
    half = 0.5 * (edges[1] - edges[0])
    mid = 0.5 * (edges[:-1] + edges[1:])
    u = (mid[:, None] + half * _GL_NODES[None, :]).ravel()
    w = np.tile(half * _GL_WEIGHTS, panels)
    return float(np.sum(w * u**l * k.eval(u)))


def validate_kernel(k: Kernel, tol: float = 1e-9) -> None:
    """Check unit mass and vanishing moments 1..declared_order."""
    m0 = kernel_moment(k, 0)
    if abs(m0 - 1.0) > tol:
        raise ParameterDomainError(f"kernel {k.name}: zeroth moment {m0} != 1")
    for l in range(1, k.declared_order):
        ml = kernel_moment(k, l)
        if abs(ml) > tol:
            raise ParameterDomainError(f"kernel {k.name}: moment {l} = {ml} != 0")


# -- weight functions ---------------------------------------------------------


def weight_lambda(x, c: float = 0.7, beta: float = 0.5):
    """Smooth plateau function: 1 on |x| <= c, 0 on |x| >= 1.

    On c < |x| < 1 it equals exp(-beta * exp(-beta / (|x|-c)^2) / (|x|-1)^2).
    """
    if not 0.0 < c < 1.0 or not beta > 0.0:
        raise ParameterDomainError(f"need 0 < c < 1 and beta > 0, got c={c}, beta={beta}")
    s = np.abs(np.asarray(x, dtype=float))
    out = np.where(s <= c, 1.0, 0.0)
    mid = (s > c) & (s < 1.0)
    if np.any(mid):
        sm = s[mid]
        with np.errstate(over="ignore", under="ignore"):
            f = beta * np.exp(-beta / (sm - c) ** 2) / (sm - 1.0) ** 2
            out[mid] = np.exp(-f)
    return out if out.ndim else float(out)


def weight_lambda_deriv(x, c: float = 0.7, beta: float = 0.5):
    """x-derivative of :func:`weight_lambda`."""
    if not 0.0 < c < 1.0 or not beta > 0.0:
        raise ParameterDomainError(f"need 0 < c < 1 and beta > 0, got c={c}, beta={beta}")
    x = np.asarray(x, dtype=float)
    s = np.abs(x)
    out = np.zeros_like(s)
    mid = (s > c) & (s < 1.0)
    if np.any(mid):
        sm = s[mid]
        with np.errstate(over="ignore", under="ignore", invalid="ignore", divide="ignore"):
            f = beta * np.exp(-beta / (sm - c) ** 2) / (sm - 1.0) ** 2
            lam = np.exp(-f)
            dfds = f * (2.0 * beta / (sm - c) ** 3 - 2.0 / (sm - 1.0))
            d = -lam * dfds
        # 0 * inf at the plateau edge and at the support boundary
        d[(f == 0.0) | (lam == 0.0) | ~np.isfinite(d)] = 0.0
        out[mid] = np.sign(x[mid]) * d
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class WeightFunction:
    """Nonnegative weight w with derivative, vanishing outside [-half_width, half_width]."""

    eval: ArrayFn
    deriv: ArrayFn
    half_width: float

    @property
    def support(self) -> tuple[float, float]:
        return (-self.half_width, self.half_width)

    def scaled(self, factor: float) -> "WeightFunction":
        """The weight multiplied by a positive constant."""
        if not factor > 0:
            raise ParameterDomainError("scale factor must be positive")
        ev, dv = self.eval, self.deriv
        return WeightFunction(lambda x: factor * ev(x), lambda x: factor * dv(x), self.half_width)


def default_weight(half_width: float = 1.4, c: float = 0.7, beta: float = 0.5) -> WeightFunction:
    """Plateau weight lambda_{c,beta}(x / half_width); defaults give support [-1.4, 1.4]."""

    def w(x):
        return weight_lambda(np.asarray(x, dtype=float) / half_width, c, beta)

    def dw(x):
        return weight_lambda_deriv(np.asarray(x, dtype=float) / half_width, c, beta) / half_width

    return WeightFunction(w, dw, half_width)


# -- quadrature ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Uniform grid on [lo, hi] with composite trapezoid integration."""

    lo: float
    hi: float
    nodes: int = 2001

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ConfigurationError("grid needs lo < hi")
        if self.nodes < 3:
            raise ConfigurationError("grid needs at least 3 nodes")
        x = np.linspace(self.lo, self.hi, self.nodes)
        x.setflags(write=False)
        object.__setattr__(self, "x", x)

    @classmethod
    def for_weight(cls, w: WeightFunction, nodes: int = 2001) -> "QuadratureGrid":
        lo, hi = w.support
        return cls(lo, hi, nodes)

    @property
    def step(self) -> float:
        return (self.hi - self.lo) / (self.nodes - 1)

    def integrate(self, values) -> float:
        return float(np.trapezoid(values, dx=self.step))

    def refined(self) -> "QuadratureGrid":
        """Same interval with the node spacing halved."""
        return QuadratureGrid(self.lo, self.hi, 2 * self.nodes - 1)


# -- density estimate ---------------------------------------------------------

_CHUNK = 1 << 20


@dataclass(frozen=True, eq=False)
class DensityEstimate:
    sample: TimeSeriesSample
    bandwidth: float
    kernel: Kernel

    def __post_init__(self):
        if not (np.isfinite(self.bandwidth) and self.bandwidth > 0):
            raise ParameterDomainError(f"bandwidth must be positive, got {self.bandwidth}")

    def _kernel_sum(self, x, fn) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        z = self.sample.values
        h = self.bandwidth
        out = np.empty(flat.size)
        step = max(1, _CHUNK // z.size)
        for start in range(0, flat.size, step):
            xs = flat[start : start + step]
            out[start : start + step] = fn((xs[:, None] - z[None, :]) / h).sum(axis=1)
        return out.reshape(x.shape)

    def pdf(self, x):
        h = self.bandwidth
        return self._kernel_sum(x, self.kernel.eval) / (len(self.sample) * h)

    def pdf_deriv(self, x):
        h = self.bandwidth
        return self._kernel_sum(x, self.kernel.deriv) / (len(self.sample) * h * h)

    def on_grid(self, grid: QuadratureGrid) -> tuple[np.ndarray, np.ndarray]:
        """``(pi_hat, pi_hat')`` at every grid node.

        Each observation is scattered onto the contiguous run of nodes within
        its kernel support, so the cost is proportional to the number of
        nonzero kernel terms rather than nodes * observations.
        """
        z = self.sample.values
        h = self.bandwidth
        reach = h * self.kernel.support_halfwidth
        x = grid.x
        dx = grid.step
        first = np.ceil((z - reach - grid.lo) / dx).astype(np.int64)
        last = np.floor((z + reach - grid.lo) / dx).astype(np.int64)
        np.clip(first, 0, grid.nodes, out=first)
        np.clip(last, -1, grid.nodes - 1, out=last)
        counts = np.maximum(last - first + 1, 0)
        total = int(counts.sum())
        if total == 0:
            return np.zeros(grid.nodes), np.zeros(grid.nodes)
        starts = np.cumsum(counts) - counts
        obs = np.repeat(np.arange(z.size), counts)
        node = np.repeat(first - starts, counts) + np.arange(total)
        u = (x[node] - z[obs]) / h
        norm = z.size * h
        pi = np.bincount(node, self.kernel.eval(u), minlength=grid.nodes) / norm
        dpi = np.bincount(node, self.kernel.deriv(u), minlength=grid.nodes) / (norm * h)
        return pi, dpi


def kde_eval(d: DensityEstimate, x):
    """Kernel density estimate at ``x`` (scalar or array)."""
    out = d.pdf(x)
    return float(out) if np.ndim(out) == 0 else out


def kde_deriv_eval(d: DensityEstimate, x):
    """Derivative of the kernel density estimate at ``x``."""
    out = d.pdf_deriv(x)
    return float(out) if np.ndim(out) == 0 else out


def empirical_wise(
    d: DensityEstimate,
    truth: ArrayFn,
    truth_deriv: ArrayFn,
    w: WeightFunction,
    grid: QuadratureGrid,
) -> tuple[float, float]:
    """Weighted integrated squared errors of ``pi_hat`` and ``pi_hat'`` against the truth."""
    lo, hi = w.support
    if grid.lo > lo or grid.hi < hi:
        raise ConfigurationError("quadrature grid must cover the weight support")
    pi, dpi = d.on_grid(grid)
    wx = w.eval(grid.x)
    ise = grid.integrate((pi - truth(grid.x)) ** 2 * wx)
    ise_deriv = grid.integrate((dpi - truth_deriv(grid.x)) ** 2 * wx)
    return ise, ise_deriv
