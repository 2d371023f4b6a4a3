# Key-rate bound: worked values, and agreement of the G form with the Reid form.

import numpy as np

from backend.app.models import Direction, RunConfig, SuiteResult
from backend.app.services.random_states import random_cm
from backend.app.steering.measures import steering_report
from backend.app.steering.twomode import LN2, key_rate_bound, key_rate_from_reid
from backend.pipelines.steps import Tally, progress_range, suite_rng

NAME = "key_rate"
WORKED_TOLERANCE = 1e-12
AGREEMENT_TOLERANCE = 1e-8

WORKED_VALUES = [
    (0.0, 0.0),
    (1.0 - LN2, 0.0),
    (1.0, LN2),
    (float(np.log(10.0)), float(np.log(10.0)) + LN2 - 1.0),
]


def run(run_config: RunConfig, progress: bool = True) -> SuiteResult:
    params = run_config.suite(NAME)
    rng = suite_rng(run_config, NAME)
    tally = Tally(NAME)

    for g, expected in WORKED_VALUES:
        tally.check(abs(key_rate_bound(g) - expected), WORKED_TOLERANCE)

    steerable = 0
    for _ in progress_range(params["count"], NAME, progress):
        report = steering_report(random_cm(1, 1, seed=rng))
        if report.g_b_to_a <= 0:
            continue
        steerable += 1
        from_measure = key_rate_bound(report.g_b_to_a)
        from_variances = key_rate_from_reid(report.reid_product_a)
        tally.check(abs(from_measure - from_variances), AGREEMENT_TOLERANCE)

    tally.detail = {"steerable": steerable}
    return tally.result()
