# Local Gaussian channels on the steering party never increase G^{A->B}.

from backend.app.models import Direction, RunConfig, SuiteResult
from backend.app.services.random_states import random_channel, random_cm
from backend.app.services.symplectic import apply_channel_A
from backend.app.steering.measures import steering_measure
from backend.pipelines.steps import Tally, progress_range, suite_rng

NAME = "monotonicity"
TOLERANCE = 1e-9


def run(run_config: RunConfig, progress: bool = True) -> SuiteResult:
    params = run_config.suite(NAME)
    rng = suite_rng(run_config, NAME)
    tally = Tally(NAME)
    channel_squeeze = params.get("channel_squeeze_bound", 1.0)

    for _ in progress_range(params["count"], NAME, progress):
        n_a = int(rng.integers(1, 3))
        sigma = random_cm(n_a, 1, seed=rng)
        ancilla = int(rng.integers(1, params["max_ancilla_modes"] + 1))
        channel = random_channel(n_a, ancilla, seed=rng, squeeze_bound=channel_squeeze)
        before = steering_measure(sigma, Direction.A_TO_B)
        after = steering_measure(apply_channel_A(sigma, channel), Direction.A_TO_B)
        tally.check(after - before, TOLERANCE)

    return tally.result()
