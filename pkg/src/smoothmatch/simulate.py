"""Synthetic observation records and the seeding contract.

Every replication owns a private ``numpy.random.Generator`` (PCG64) seeded
from :func:`substream_seed`, so results never depend on the order in which
replications are executed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, DivergenceError, ParameterDomainError
from .models import DriftSpec, OuModel

MASK64 = (1 << 64) - 1


def splitmix64(z: int) -> int:
    """SplitMix64 finalizer, a bijection on 64-bit unsigned integers."""
    z = (z + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class SeedSpec:
    base_seed: int
    replication_index: int = 0

    def __post_init__(self):
        if not 0 <= self.base_seed <= MASK64:
            raise ConfigurationError(f"base_seed must fit in 64 bits, got {self.base_seed}")
        if not 0 <= self.replication_index <= MASK64:
            raise ConfigurationError(f"replication_index out of range: {self.replication_index}")


def substream_seed(seed: SeedSpec) -> int:
    """Mix ``(base_seed, replication_index)`` into one 64-bit seed.

    ``splitmix64(splitmix64(base) ^ index)``: for a fixed base the map is
    injective in the index since both stages are bijections.
    """
    return splitmix64(splitmix64(seed.base_seed) ^ seed.replication_index)


def make_rng(seed: SeedSpec) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(substream_seed(seed)))


@dataclass(frozen=True, eq=False)
class TimeSeriesSample:
    """Equally spaced observations Z_0, ..., Z_n with spacing ``delta``."""

    delta: float
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float).ravel()
        if values.size == 0:
            raise ParameterDomainError("sample must contain at least one observation")
        if not np.all(np.isfinite(values)):
            raise ParameterDomainError("sample contains non-finite values")
        if not (np.isfinite(self.delta) and self.delta > 0):
            raise ParameterDomainError(f"delta must be positive, got {self.delta}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        """Number of transitions, i.e. ``len(values) - 1``."""
        return self.values.size - 1

    def __len__(self) -> int:
        return self.values.size


def sample_ou_exact(model: OuModel, n: int, seed: SeedSpec) -> TimeSeriesSample:
    """Draw Z_0..Z_n from the stationary OU process via its AR(1) representation."""
    if n < 1:
        raise ConfigurationError(f"n must be >= 1, got {n}")
    rng = make_rng(seed)
    a = model.ar_coefficient
    noise = rng.standard_normal(n + 1)
    noise[0] *= math.sqrt(model.stationary_variance)
    noise[1:] *= math.sqrt(model.innovation_variance)
    z = np.empty(n + 1)
    prev = z[0] = noise[0]
    for j in range(1, n + 1):
        prev = a * prev + noise[j]
        z[j] = prev
    return TimeSeriesSample(model.delta, z)


def default_burn_in(theta_lo: float, delta: float) -> int:
    """Ten mean-reversion times, in recorded observations."""
    return int(math.ceil(10.0 / (theta_lo * delta)))


def sample_euler_maruyama(
    drift: DriftSpec,
    theta: float,
    sigma: float,
    delta: float,
    substeps: int,
    n: int,
    burn_in: int,
    x0: float,
    seed: SeedSpec,
) -> TimeSeriesSample:
    """Euler-Maruyama path recorded every ``delta`` with ``substeps`` inner steps.

    The first ``burn_in`` recorded points are discarded; ``n + 1`` values are
    returned, the first of which is the state after burn-in.
    """
    if substeps < 1:
        raise ConfigurationError("substeps must be >= 1")
    if burn_in < 0:
        raise ConfigurationError("burn_in must be >= 0")
    if n < 0:
        raise ConfigurationError("n must be >= 0")
    if not delta > 0:
        raise ParameterDomainError(f"delta must be positive, got {delta}")
    rng = make_rng(seed)
    dt = delta / substeps
    scale = sigma * math.sqrt(dt)
    mu = drift.mu
    total = burn_in + n + 1
    out = np.empty(total)
    x = float(x0)
    out[0] = x
    block = max(1, 2**16 // substeps)
    step = 0
    rec = 1
    while rec < total:
        nrec = min(block, total - rec)
        noise = (scale * rng.standard_normal((nrec, substeps))).tolist()
        for row in noise:
            try:
                for dw in row:
                    x = x + float(mu(x, theta)) * dt + dw
                    step += 1
            except OverflowError:
                raise DivergenceError(step) from None
            if not math.isfinite(x):
                raise DivergenceError(step)
            out[rec] = x
            rec += 1
    return TimeSeriesSample(delta, out[burn_in:])


def write_sample_csv(sample: TimeSeriesSample, path) -> None:
    """Write ``# delta=<value>`` followed by a ``j,z`` table."""
    path = Path(path)
    lines = [f"# delta={sample.delta!r}", "j,z"]
    lines.extend(f"{j},{z!r}" for j, z in enumerate(sample.values.tolist()))
    path.write_text("\n".join(lines) + "\n")


def read_sample_csv(path, delta: float | None = None) -> TimeSeriesSample:
    """Read a sample written by :func:`write_sample_csv`.

    ``delta`` overrides (or supplies) the spacing from the metadata line.
    """
    path = Path(path)
    meta_delta = None
    values = []
    for raw in path.read_text().splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if body.startswith("delta="):
                meta_delta = float(body.split("=", 1)[1])
            continue
        if line.replace(" ", "") == "j,z":
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ConfigurationError(f"{path}: malformed row {raw!r}")
        values.append(float(parts[1]))
    spacing = delta if delta is not None else meta_delta
    if spacing is None:
        raise ConfigurationError(f"{path}: no '# delta=' line and no delta given")
    return TimeSeriesSample(spacing, np.array(values))
