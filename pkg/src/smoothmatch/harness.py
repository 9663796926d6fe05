"""Monte Carlo comparison of the smooth-and-match estimator with its competitors.

A *cell* is one (delta, n) pair.  Each replication draws a stationary OU
sample of n+1 points from its own seed substream, runs every configured
estimator, and the cell reports mean, unbiased variance, squared bias and
MSE per estimator together with the efficiency bound.
"""

from __future__ import annotations

import io
import logging
import math
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .baselines import LikelihoodParts, efficiency_bound, kessler_estimator, one_step, ou_mle
from .errors import ConfigurationError, NumericalError
from .models import DEFAULT_THETA_SPACE, OuModel, ParameterInterval
from .simulate import MASK64, SeedSpec, sample_ou_exact, splitmix64
from .smatch import sm_estimator

log = logging.getLogger(__name__)

ESTIMATORS = ("sm", "onestep", "kessler", "mle")
TABLE_DELTAS = (0.01, 0.05, 0.1, 1.0)
TABLE_NS = (99, 199)
DEFAULT_SEED = 20120917

SUMMARY_HEADER = "delta,n,estimator,mean,variance,bias_sq,mse,eb,k,excluded"
RAW_HEADER = "delta,n,rep,estimator,estimate,bandwidth"


@dataclass(frozen=True)
class ExperimentConfig:
    theta0: float = 2.0
    sigma: float = 1.0
    deltas: Sequence[float] = TABLE_DELTAS
    ns: Sequence[int] = TABLE_NS
    k: int = 200
    base_seed: int = DEFAULT_SEED
    theta_space: ParameterInterval = DEFAULT_THETA_SPACE
    estimators: Sequence[str] = ESTIMATORS
    include_stationary_term: bool = True
    workers: int = 1
    out: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "deltas", tuple(float(d) for d in self.deltas))
        object.__setattr__(self, "ns", tuple(int(n) for n in self.ns))
        object.__setattr__(self, "estimators", tuple(self.estimators))
        if self.k < 2:
            raise ConfigurationError("need at least k=2 replications")
        if not self.deltas or any(not d > 0 for d in self.deltas):
            raise ConfigurationError("deltas must be positive")
        if not self.ns or any(n < 10 for n in self.ns):
            raise ConfigurationError("every n must be >= 10")
        unknown = set(self.estimators) - set(ESTIMATORS)
        if unknown or not self.estimators:
            raise ConfigurationError(f"unknown estimators {sorted(unknown)}; choose from {ESTIMATORS}")
        if not (self.theta0 > 0 and self.sigma > 0):
            raise ConfigurationError("theta0 and sigma must be positive")
        if not 0 <= self.base_seed <= MASK64:
            raise ConfigurationError("seed must fit in 64 bits")
        if self.workers < 1:
            raise ConfigurationError("workers must be >= 1")


@dataclass(frozen=True)
class EstimatorStats:
    mean: float
    variance: float
    bias_sq: float
    mse: float
    k: int
    excluded: int


@dataclass
class CellResult:
    delta: float
    n: int
    eb: float
    estimates: dict[str, np.ndarray]
    bandwidths: dict[str, np.ndarray]
    stats: dict[str, EstimatorStats]
    errors: list[tuple[int, str, str]] = field(default_factory=list)


@dataclass
class MonteCarloReport:
    config: ExperimentConfig
    cells: list[CellResult] = field(default_factory=list)

    def cell(self, delta: float, n: int) -> CellResult:
        for c in self.cells:
            if c.delta == delta and c.n == n:
                return c
        raise KeyError((delta, n))

    def mse(self, delta: float, n: int, estimator: str) -> float:
        return self.cell(delta, n).stats[estimator].mse


def cell_seed(base_seed: int, delta: float, n: int) -> int:
    """Seed for one (delta, n) cell, so cells can be re-run independently."""
    (bits,) = struct.unpack("<Q", struct.pack("<d", float(delta)))
    return splitmix64(splitmix64(base_seed ^ splitmix64(bits)) ^ n)


def aggregate(estimates: np.ndarray, theta0: float) -> EstimatorStats:
    """Mean, unbiased variance, squared bias and MSE over the finite estimates."""
    est = np.asarray(estimates, dtype=float)
    ok = est[np.isfinite(est)]
    k = ok.size
    if k == 0:
        return EstimatorStats(math.nan, math.nan, math.nan, math.nan, 0, est.size)
    mean = float(np.mean(ok))
    var = float(np.var(ok, ddof=1)) if k > 1 else math.nan
    bias_sq = (mean - theta0) ** 2
    return EstimatorStats(mean, var, bias_sq, var + bias_sq, k, est.size - k)


def run_replication(cfg: ExperimentConfig, delta: float, n: int, rep: int):
    """Estimates for one replication: ``{estimator: (estimate, bandwidth, error)}``."""
    model = OuModel(cfg.theta0, cfg.sigma, delta)
    sample = sample_ou_exact(model, n, SeedSpec(cell_seed(cfg.base_seed, delta, n), rep))
    out = {}
    sm = None
    if "sm" in cfg.estimators or "onestep" in cfg.estimators:
        try:
            sm = sm_estimator(sample, cfg.sigma, space=cfg.theta_space)
            out["sm"] = (sm.theta_hat, sm.bandwidth, "")
        except NumericalError as exc:
            out["sm"] = (math.nan, math.nan, f"{type(exc).__name__}: {exc}")
    if "onestep" in cfg.estimators:
        if sm is None:
            out["onestep"] = (math.nan, math.nan, "preliminary estimate failed")
        else:
            try:
                parts = LikelihoodParts(sample, cfg.sigma, cfg.include_stationary_term)
                res = one_step(sm.theta_hat, sample, cfg.sigma, parts, cfg.theta_space)
                out["onestep"] = (res.theta_bar, sm.bandwidth, "")
            except NumericalError as exc:
                out["onestep"] = (math.nan, math.nan, f"{type(exc).__name__}: {exc}")
    if "kessler" in cfg.estimators:
        try:
            raw = kessler_estimator(sample, cfg.sigma)
            out["kessler"] = (cfg.theta_space.clamp(raw)[0], math.nan, "")
        except NumericalError as exc:
            out["kessler"] = (math.nan, math.nan, f"{type(exc).__name__}: {exc}")
    if "mle" in cfg.estimators:
        out["mle"] = (ou_mle(sample, cfg.sigma, cfg.theta_space, cfg.include_stationary_term), math.nan, "")
    return {name: out[name] for name in cfg.estimators}


def _map(fn, items: Iterable, workers: int) -> list:
    if workers == 1:
        return [fn(i) for i in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map preserves submission order, so folding below never sees completion order
        return list(pool.map(fn, items, chunksize=8))


def run_cell(cfg: ExperimentConfig, delta: float, n: int) -> CellResult:
    reps = _map(partial(run_replication, cfg, delta, n), range(cfg.k), cfg.workers)
    estimates, bandwidths, stats = {}, {}, {}
    errors = []
    for name in cfg.estimators:
        est = np.array([r[name][0] for r in reps])
        bws = np.array([r[name][1] for r in reps])
        errors.extend((i, name, r[name][2]) for i, r in enumerate(reps) if r[name][2])
        estimates[name], bandwidths[name] = est, bws
        stats[name] = aggregate(est, cfg.theta0)
    eb = efficiency_bound(cfg.theta0, cfg.sigma, delta, n + 1)
    if errors:
        log.warning("cell delta=%g n=%d: %d excluded estimates", delta, n, len(errors))
    return CellResult(delta, n, eb, estimates, bandwidths, stats, errors)


def run_experiment(cfg: ExperimentConfig) -> MonteCarloReport:
    report = MonteCarloReport(cfg)
    for delta in cfg.deltas:
        for n in cfg.ns:
            log.info("running cell delta=%g n=%d k=%d", delta, n, cfg.k)
            report.cells.append(run_cell(cfg, delta, n))
    return report


def reproduce_table1(cfg: ExperimentConfig | None = None) -> MonteCarloReport:
    """Run the benchmark grid (all four estimators) and write reports if ``cfg.out`` is set."""
    cfg = cfg or ExperimentConfig()
    report = run_experiment(cfg)
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        write_report(report, out / "summary.csv", "csv")
        write_report(report, out / "raw.csv", "raw")
        write_report(report, out / "table.txt", "table")
    return report


# -- output ---------------------------------------------------------------------


def _num(x: float) -> str:
    return repr(float(x))


def summary_csv(report: MonteCarloReport) -> str:
    lines = [SUMMARY_HEADER]
    for c in report.cells:
        for name, s in c.stats.items():
            fields = [c.delta, c.n, name, s.mean, s.variance, s.bias_sq, s.mse, c.eb]
            lines.append(",".join([_num(c.delta), str(c.n), name] + [_num(v) for v in fields[3:]] + [str(s.k), str(s.excluded)]))
    return "\n".join(lines) + "\n"


def raw_csv(report: MonteCarloReport) -> str:
    lines = [RAW_HEADER]
    for c in report.cells:
        k = len(next(iter(c.estimates.values()))) if c.estimates else 0
        for rep in range(k):
            for name in c.estimates:
                lines.append(
                    f"{_num(c.delta)},{c.n},{rep},{name},{_num(c.estimates[name][rep])},{_num(c.bandwidths[name][rep])}"
                )
    return "\n".join(lines) + "\n"


_TABLE_LABELS = {"sm": "smooth-match", "onestep": "one-step", "kessler": "kessler", "mle": "mle"}


def table_text(report: MonteCarloReport) -> str:
    """Fixed-width MSE table, one block per delta with a row per n."""
    names = list(report.config.estimators)
    buf = io.StringIO()
    head = f"{'delta':>6} {'n':>5} |" + "".join(f"{_TABLE_LABELS[n]:>14}" for n in names) + f"{'EB':>10}"
    buf.write(head + "\n" + "-" * len(head) + "\n")
    last_delta = None
    for c in report.cells:
        if last_delta is not None and c.delta != last_delta:
            buf.write("-" * len(head) + "\n")
        label = f"{c.delta:g}" if c.delta != last_delta else ""
        last_delta = c.delta
        row = f"{label:>6} {c.n:>5} |" + "".join(f"{c.stats[n].mse:>14.4g}" for n in names) + f"{c.eb:>10.4g}"
        buf.write(row + "\n")
    return buf.getvalue()


def write_report(report: MonteCarloReport, path, format: str = "csv") -> Path:
    """Write the summary CSV (``csv``), per-replication CSV (``raw``) or text table (``table``)."""
    render = {"csv": summary_csv, "raw": raw_csv, "table": table_text}
    if format not in render:
        raise ConfigurationError(f"unknown report format {format!r}")
    path = Path(path)
    try:
        path.write_text(render[format](report))
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc
    return path


def read_raw_csv(path) -> dict[tuple[float, int, str], np.ndarray]:
    """Estimates per (delta, n, estimator), ordered by replication index."""
    rows: dict[tuple[float, int, str], dict[int, float]] = {}
    with open(path) as fh:
        header = fh.readline().strip()
        if header != RAW_HEADER:
            raise ConfigurationError(f"{path}: unexpected header {header!r}")
        for line in fh:
            if not line.strip():
                continue
            delta, n, rep, name, est, _ = line.strip().split(",")
            rows.setdefault((float(delta), int(n), name), {})[int(rep)] = float(est)
    return {key: np.array([v[i] for i in sorted(v)]) for key, v in rows.items()}
