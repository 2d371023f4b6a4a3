# For pure states steerability collapses onto entanglement: G = S(A) in both directions.

from backend.app.models import Direction, RunConfig, SuiteResult
from backend.app.services.random_states import random_cm
from backend.app.steering.measures import renyi2_entropy, steering_measure
from backend.pipelines.steps import Tally, progress_range, suite_rng

NAME = "hierarchy"
TOLERANCE = 1e-8


def run(run_config: RunConfig, progress: bool = True) -> SuiteResult:
    params = run_config.suite(NAME)
    rng = suite_rng(run_config, NAME)
    tally = Tally(NAME)

    for _ in progress_range(params["count"], NAME, progress):
        n_a = int(rng.integers(1, params["max_modes_a"] + 1))
        sigma = random_cm(n_a, 1, temperature_scale=1.0, seed=rng)
        entropy = renyi2_entropy(sigma.a_block)
        for direction in Direction:
            tally.check(abs(steering_measure(sigma, direction) - entropy), TOLERANCE * max(1.0, entropy))

    return tally.result()
