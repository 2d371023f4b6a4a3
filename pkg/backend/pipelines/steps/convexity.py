# Coherent information is convex under mixing of CMs, and so is G = max{0, I}.

from backend.app.models import CovarianceMatrix, Direction, RunConfig, SuiteResult
from backend.app.services.random_states import random_cm
from backend.app.steering.measures import coherent_information, steering_measure
from backend.pipelines.steps import Tally, progress_range, suite_rng

NAME = "convexity"
TOLERANCE = 1e-9


def run(run_config: RunConfig, progress: bool = True) -> SuiteResult:
    params = run_config.suite(NAME)
    rng = suite_rng(run_config, NAME)
    tally = Tally(NAME)

    for _ in progress_range(params["count"], NAME, progress):
        n_a = int(rng.integers(1, 3))
        first = random_cm(n_a, 1, seed=rng)
        second = random_cm(n_a, 1, seed=rng)
        for weight in params["weights"]:
            mixed = CovarianceMatrix.from_array(weight * first.data + (1 - weight) * second.data, n_a, 1)
            for measure in (coherent_information, steering_measure):
                chord = weight * measure(first, Direction.A_TO_B) + (1 - weight) * measure(second, Direction.A_TO_B)
                tally.check(measure(mixed, Direction.A_TO_B) - chord, TOLERANCE)

    return tally.result()
