from functools import lru_cache

from smoothmatch.harness import ExperimentConfig, run_experiment

ACCEPTANCE_LINES: list[str] = []

# Delta=1, n=199 at k=500: shared by the ordering criterion and the shape screen
LARGE_K_CFG = ExperimentConfig(deltas=(1.0,), ns=(199,), k=500, estimators=("sm", "onestep", "mle"))


def record(criterion: str, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"{'PASS' if passed else 'FAIL'}  {criterion}: {detail}")


@lru_cache(maxsize=None)
def cached_experiment(cfg: ExperimentConfig):
    """Monte Carlo reports shared between test modules within one session."""
    return run_experiment(cfg)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
