# PPT states are never Gaussian-steerable in either direction: G is clamped to
# exactly 0, and for a single steered mode the coherent information is non-positive too.

from backend.app import config
from backend.app.models import Direction, RunConfig, SuiteResult
from backend.app.services.random_states import random_cm
from backend.app.services.symplectic import bona_fide_margin, partial_transpose, psd_tolerance
from backend.app.steering.measures import coherent_information, steering_measure
from backend.pipelines.steps import Tally, progress_range, suite_rng

NAME = "ppt_nonsteerable"


def run(run_config: RunConfig, progress: bool = True) -> SuiteResult:
    params = run_config.suite(NAME)
    rng = suite_rng(run_config, NAME)
    tally = Tally(NAME)
    tol = config.TOLERANCES["psd"]
    partitions = [tuple(p) for p in params["partitions"]]
    ppt_count = 0
    marginal_count = 0

    for i in progress_range(params["count"], NAME, progress):
        n_a, n_b = partitions[i % len(partitions)]
        # mix weakly and strongly squeezed draws so both PPT and NPT states occur
        bound = rng.uniform(0.0, config.RANDOM_CM_PARAMS["squeeze_bound"])
        sigma = random_cm(n_a, n_b, seed=rng, squeeze_bound=bound)
        margin = bona_fide_margin(partial_transpose(sigma).data)
        threshold = psd_tolerance(sigma.data)
        if margin < -threshold:
            continue
        ppt_count += 1

        # PPT only within tolerance: rounding may leave G a hair above zero
        marginal = margin <= threshold
        marginal_count += marginal
        for direction in Direction:
            tally.check(steering_measure(sigma, direction), tol if marginal else 0.0)
            if sigma.modes(direction.steered) == 1:
                tally.check(coherent_information(sigma, direction), tol)

    tally.detail = {"drawn": params["count"], "ppt": ppt_count, "ppt_within_tolerance": marginal_count}
    return tally.result()
