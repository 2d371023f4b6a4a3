# With one steered mode the measure reduces to max{0, S(A) - S(sigma)}.

from backend.app.models import Direction, RunConfig, SuiteResult
from backend.app.services.random_states import random_cm
from backend.app.steering.measures import renyi2_entropy, steering_measure
from backend.pipelines.steps import Tally, progress_range, suite_rng

NAME = "determinant_reduction"
TOLERANCE = 1e-8


def run(run_config: RunConfig, progress: bool = True) -> SuiteResult:
    params = run_config.suite(NAME)
    rng = suite_rng(run_config, NAME)
    tally = Tally(NAME)

    for _ in progress_range(params["count"], NAME, progress):
        n_a = int(rng.integers(1, params["max_modes_a"] + 1))
        sigma = random_cm(n_a, 1, seed=rng)
        closed_form = max(0.0, renyi2_entropy(sigma.a_block) - renyi2_entropy(sigma))
        tally.check(abs(steering_measure(sigma, Direction.A_TO_B) - closed_form), TOLERANCE)

    return tally.result()
