# Monte Carlo conditional variances against det M^A and det M^B.

import logging

from backend.app.models import Party, RunConfig, SuiteResult
from backend.app.services.random_states import random_cm
from backend.app.steering.measures import conditional_variance_product
from backend.app.steering.twomode import standard_form_cm, to_standard_form
from backend.evaluators.monte_carlo import empirical_reid_product, reid_product_standard_error, sample_gaussian
from backend.pipelines.steps import progress_range, suite_rng

logger = logging.getLogger(__name__)

NAME = "oracle_reid"


def run(run_config: RunConfig, progress: bool = True) -> SuiteResult:
    params = run_config.suite(NAME)
    rng = suite_rng(run_config, NAME)
    samples = params.get("samples", run_config.samples)
    passes = 0
    max_z = 0.0

    for i in progress_range(params["states"], NAME, progress):
        sigma = standard_form_cm(to_standard_form(random_cm(1, 1, seed=rng)))
        batch = sample_gaussian(sigma, samples, seed=run_config.seed + i, workers=run_config.workers)
        state_ok = True
        for steered in Party:
            target = conditional_variance_product(sigma, steered)
            z = abs(empirical_reid_product(batch, steered) - target) / reid_product_standard_error(target, samples)
            max_z = max(max_z, z)
            state_ok &= z <= params["sigmas"]
        passes += int(state_ok)
        if not state_ok:
            logger.info("state %d outside %.1f standard errors", i, params["sigmas"])

    return SuiteResult(
        name=NAME,
        passed=passes >= params["min_pass"],
        checked=params["states"],
        violations=params["states"] - passes,
        max_deviation=max_z,
        detail={"samples": samples, "within_band": passes},
    )
