# Symplectic eigenvalues against an independent Hermitian eigensolve.

from backend.app.models import RunConfig, SuiteResult
from backend.app.services.random_states import random_cm
from backend.evaluators.eigen_crosscheck import max_eigen_deviation
from backend.pipelines.steps import Tally, progress_range, suite_rng

NAME = "oracle_eigen"
TOLERANCE = 1e-8


def run(run_config: RunConfig, progress: bool = True) -> SuiteResult:
    params = run_config.suite(NAME)
    rng = suite_rng(run_config, NAME)
    tally = Tally(NAME)

    for _ in progress_range(params["count"], NAME, progress):
        n_modes = int(rng.integers(2, params["max_modes"] + 1))
        n_a = int(rng.integers(1, n_modes))
        sigma = random_cm(n_a, n_modes - n_a, seed=rng)
        tally.check(max_eigen_deviation(sigma.data), TOLERANCE)

    return tally.result()
