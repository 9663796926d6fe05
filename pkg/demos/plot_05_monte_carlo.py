"""
A small Monte Carlo table
=========================

Bias, variance and mean squared error of the four estimators over
independent replications.  Each (delta, n) cell owns its own seed stream, so
cells can be rerun individually and the result does not depend on the
number of worker processes.  The full grid with 200 replications is
``smoothmatch mc-table``; this run is scaled down to take a few seconds.
"""

from smoothmatch import ExperimentConfig, run_experiment
from smoothmatch.harness import summary_csv, table_text

cfg = ExperimentConfig(deltas=(0.1, 1.0), ns=(99, 199), k=40)
report = run_experiment(cfg)
print(table_text(report))

# %%
# The machine-readable summary has one row per (delta, n, estimator).
print(summary_csv(report))
