"""Command-line entry point.

Subcommands: ``simulate``, ``estimate``, ``mc-table`` and ``kde-check``.
Every subcommand accepts ``--config FILE`` with ``key = value`` lines whose
keys mirror the long flag names; flags given on the command line win.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .baselines import LikelihoodParts, kessler_estimator, one_step, ou_mle
from .errors import ConfigurationError, NumericalError, ParameterDomainError
from .harness import DEFAULT_SEED, ESTIMATORS, ExperimentConfig, reproduce_table1, table_text
from .kde import biweight4_kernel, kernel_moment, default_weight
from .models import DRIFTS, OuModel, ParameterInterval
from .simulate import SeedSpec, default_burn_in, read_sample_csv, sample_euler_maruyama, sample_ou_exact, write_sample_csv
from .smatch import sm_estimator

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3


def _float_list(text: str) -> list[float]:
    return [float(t) for t in str(text).split(",") if t.strip()]


def _int_list(text: str) -> list[int]:
    return [int(t) for t in str(text).split(",") if t.strip()]


def _str_list(text: str) -> list[str]:
    return [t.strip() for t in str(text).split(",") if t.strip()]


def _on_off(text: str) -> bool:
    value = str(text).strip().lower()
    if value in ("on", "true", "yes", "1"):
        return True
    if value in ("off", "false", "no", "0"):
        return False
    raise argparse.ArgumentTypeError(f"expected on/off, got {text!r}")


def read_config(path) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.lstrip("-").replace("-", "_")] = value
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="smoothmatch", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="write a simulated path as CSV")
    p.add_argument("--config")
    p.add_argument("--model", choices=sorted(DRIFTS), default="ou")
    p.add_argument("--theta", type=float, default=2.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--n", type=int, default=199, help="number of transitions (n+1 values)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--rep", type=int, default=0, help="replication index of the seed substream")
    p.add_argument("--method", choices=["exact", "euler"], default="exact")
    p.add_argument("--substeps", type=int, default=100)
    p.add_argument("--burn-in", type=int)
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--out", help="output path (default: stdout)")

    p = sub.add_parser("estimate", help="estimate theta from a sample CSV")
    p.add_argument("input")
    p.add_argument("--config")
    p.add_argument("--model", choices=sorted(DRIFTS), default="ou")
    p.add_argument("--estimator", choices=ESTIMATORS, default="sm")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--theta-lo", type=float, default=0.05)
    p.add_argument("--theta-hi", type=float, default=20.0)
    p.add_argument("--bandwidth", default="auto", help="'auto' (quasi-optimality) or a positive number")
    p.add_argument("--delta", type=float, help="override the spacing recorded in the file")
    p.add_argument("--stationary-term", type=_on_off, default=True)

    p = sub.add_parser("mc-table", help="Monte Carlo MSE table")
    p.add_argument("--config")
    p.add_argument("--theta0", type=float, default=2.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--deltas", type=_float_list, default="0.01,0.05,0.1,1")
    p.add_argument("--ns", type=_int_list, default="99,199")
    p.add_argument("--k", type=int, default=200)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--estimators", type=_str_list, default=",".join(ESTIMATORS))
    p.add_argument("--theta-lo", type=float, default=0.05)
    p.add_argument("--theta-hi", type=float, default=20.0)
    p.add_argument("--stationary-term", type=_on_off, default=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="directory for summary.csv, raw.csv and table.txt")

    p = sub.add_parser("kde-check", help="kernel moments and weight probes as CSV")
    p.add_argument("--config")
    p.add_argument("--max-moment", type=int, default=6)
    p.add_argument("--probes", type=_float_list, default="0,0.5,0.9,0.98,1.1,1.2,1.3,1.35,1.4,1.5")
    return parser


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        values = read_config(args.config)
        subparser = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in subparser._actions}
        unknown = sorted(set(values) - known - {"config"})
        if unknown:
            raise ConfigurationError(f"unknown config keys for {args.command}: {unknown}")
        subparser.set_defaults(**{k: v for k, v in values.items() if k != "config"})
        args = parser.parse_args(argv)
    return args


def cmd_simulate(args) -> int:
    seed = SeedSpec(args.seed, args.rep)
    if args.method == "exact":
        if args.model != "ou":
            raise ConfigurationError("exact simulation is available for the ou model only")
        sample = sample_ou_exact(OuModel(args.theta, args.sigma, args.delta), args.n, seed)
    else:
        burn = args.burn_in if args.burn_in is not None else default_burn_in(args.theta, args.delta)
        sample = sample_euler_maruyama(
            DRIFTS[args.model], args.theta, args.sigma, args.delta, args.substeps, args.n, burn, args.x0, seed
        )
    if args.out:
        write_sample_csv(sample, args.out)
    else:
        sys.stdout.write(f"# delta={sample.delta!r}\nj,z\n")
        sys.stdout.writelines(f"{j},{z!r}\n" for j, z in enumerate(sample.values.tolist()))
    return EXIT_OK


def cmd_estimate(args) -> int:
    try:
        sample = read_sample_csv(args.input, args.delta)
    except OSError as exc:
        raise ConfigurationError(f"cannot read {args.input}: {exc}") from exc
    space = ParameterInterval(args.theta_lo, args.theta_hi)
    if args.estimator != "sm" and args.model != "ou":
        raise ConfigurationError(f"estimator {args.estimator!r} is available for the ou model only")
    bandwidth = None
    if str(args.bandwidth) != "auto":
        try:
            bandwidth = float(args.bandwidth)
        except ValueError:
            raise ConfigurationError(f"--bandwidth must be 'auto' or a number, got {args.bandwidth!r}") from None
    h, crit = float("nan"), float("nan")
    if args.estimator in ("sm", "onestep"):
        est = sm_estimator(sample, args.sigma, DRIFTS[args.model], space, bandwidth=bandwidth)
        theta, h, crit = est.theta_hat, est.bandwidth, est.criterion_value
        if args.estimator == "onestep":
            parts = LikelihoodParts(sample, args.sigma, args.stationary_term)
            theta = one_step(theta, sample, args.sigma, parts, space).theta_bar
    elif args.estimator == "kessler":
        theta = space.clamp(kessler_estimator(sample, args.sigma))[0]
    else:
        theta = ou_mle(sample, args.sigma, space, args.stationary_term)
    print("estimator,theta_hat,bandwidth,criterion")
    print(f"{args.estimator},{theta!r},{h!r},{crit!r}")
    return EXIT_OK


def cmd_mc_table(args) -> int:
    cfg = ExperimentConfig(
        theta0=args.theta0,
        sigma=args.sigma,
        deltas=args.deltas,
        ns=args.ns,
        k=args.k,
        base_seed=args.seed,
        theta_space=ParameterInterval(args.theta_lo, args.theta_hi),
        estimators=args.estimators,
        include_stationary_term=args.stationary_term,
        workers=args.workers,
        out=args.out,
    )
    report = reproduce_table1(cfg)
    sys.stdout.write(table_text(report))
    excluded = sum(len(c.errors) for c in report.cells)
    if excluded:
        print(f"excluded estimates: {excluded}", file=sys.stderr)
    return EXIT_OK


def cmd_kde_check(args) -> int:
    kernel = biweight4_kernel()
    print("moment,value")
    for l in range(args.max_moment + 1):
        print(f"{l},{kernel_moment(kernel, l)!r}")
    w = default_weight()
    x = np.asarray(args.probes, dtype=float)
    print()
    print("x,w,w_prime")
    for xi, wi, di in zip(x.tolist(), w.eval(x).tolist(), w.deriv(x).tolist()):
        print(f"{xi!r},{wi!r},{di!r}")
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "estimate": cmd_estimate, "mc-table": cmd_mc_table, "kde-check": cmd_kde_check}


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_CONFIG
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigurationError, ParameterDomainError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
