# G of a direct sum is the sum of the measures, in both directions.

from backend.app.models import Direction, RunConfig, SuiteResult
from backend.app.services.random_states import random_cm
from backend.app.services.symplectic import direct_sum
from backend.app.steering.measures import steering_measure
from backend.pipelines.steps import Tally, progress_range, suite_rng

NAME = "additivity"
TOLERANCE = 1e-9


def _random_partition(rng) -> tuple[int, int]:
    return int(rng.integers(1, 3)), int(rng.integers(1, 3))


def run(run_config: RunConfig, progress: bool = True) -> SuiteResult:
    params = run_config.suite(NAME)
    rng = suite_rng(run_config, NAME)
    tally = Tally(NAME)

    for _ in progress_range(params["count"], NAME, progress):
        first = random_cm(*_random_partition(rng), seed=rng)
        second = random_cm(*_random_partition(rng), seed=rng)
        joint = direct_sum(first, second)
        for direction in Direction:
            expected = steering_measure(first, direction) + steering_measure(second, direction)
            tally.check(abs(steering_measure(joint, direction) - expected), TOLERANCE * max(1.0, expected))

    return tally.result()
