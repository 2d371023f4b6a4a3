# Local symplectics leave G, det sigma and the symplectic spectra unchanged.

import numpy as np

from backend.app.models import Direction, RunConfig, SuiteResult
from backend.app.services.random_states import random_cm, random_symplectic
from backend.app.services.symplectic import apply_local_symplectic, symplectic_eigenvalues
from backend.app.steering.measures import renyi2_entropy, steering_measure
from backend.pipelines.steps import Tally, progress_range, suite_rng

NAME = "invariance"
TOLERANCE = 1e-9
LOCAL_SQUEEZE_BOUND = 1.0


def _relative_gap(first: np.ndarray, second: np.ndarray) -> float:
    return float(np.max(np.abs(first - second) / np.maximum(1.0, np.abs(first))))


def run(run_config: RunConfig, progress: bool = True) -> SuiteResult:
    params = run_config.suite(NAME)
    rng = suite_rng(run_config, NAME)
    tally = Tally(NAME)

    for _ in progress_range(params["count"], NAME, progress):
        n_a, n_b = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        sigma = random_cm(n_a, n_b, seed=rng)
        moved = apply_local_symplectic(
            sigma,
            random_symplectic(n_a, rng, LOCAL_SQUEEZE_BOUND),
            random_symplectic(n_b, rng, LOCAL_SQUEEZE_BOUND),
        )
        for direction in Direction:
            before = steering_measure(sigma, direction)
            tally.check(abs(steering_measure(moved, direction) - before), TOLERANCE * max(1.0, before))
        # ln det compared instead of det, so the check is scale free
        tally.check(abs(renyi2_entropy(moved) - renyi2_entropy(sigma)), TOLERANCE)
        tally.check(_relative_gap(symplectic_eigenvalues(sigma.data), symplectic_eigenvalues(moved.data)), TOLERANCE)
        tally.check(_relative_gap(symplectic_eigenvalues(sigma.a_block), symplectic_eigenvalues(moved.a_block)), TOLERANCE)
        tally.check(_relative_gap(symplectic_eigenvalues(sigma.b_block), symplectic_eigenvalues(moved.b_block)), TOLERANCE)

    return tally.result()
