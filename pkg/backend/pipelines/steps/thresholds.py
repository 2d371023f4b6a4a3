# Purity thresholds agree with the measures computed from the CM itself.

from backend.app.models import Direction, Physicality, RunConfig, Separability, SuiteResult
from backend.app.services.random_states import random_cm
from backend.app.services.symplectic import is_ppt
from backend.app.steering.measures import steering_measure
from backend.app.steering.twomode import classify_two_mode, purity_profile
from backend.pipelines.steps import Tally, progress_range, suite_rng

NAME = "thresholds"
BOUNDARY_BAND = 1e-9


def run(run_config: RunConfig, progress: bool = True) -> SuiteResult:
    params = run_config.suite(NAME)
    rng = suite_rng(run_config, NAME)
    tally = Tally(NAME)
    skipped = 0

    for _ in progress_range(params["count"], NAME, progress):
        sigma = random_cm(1, 1, seed=rng)
        profile = purity_profile(sigma)
        label = classify_two_mode(profile)
        tally.check(0.0 if label.physicality is Physicality.PHYSICAL else 1.0, 0.0)

        for direction, flag, mu in (
            (Direction.A_TO_B, label.steer_a_to_b, profile.mu_b),
            (Direction.B_TO_A, label.steer_b_to_a, profile.mu_a),
        ):
            if abs(profile.eta - mu) < BOUNDARY_BAND:
                skipped += 1
                continue
            tally.check(0.0 if flag == (steering_measure(sigma, direction) > 0) else 1.0, 0.0)

        if label.separability is Separability.SEPARABLE:
            tally.check(0.0 if is_ppt(sigma) else 1.0, 0.0)
        elif label.separability is Separability.ENTANGLED:
            tally.check(0.0 if not is_ppt(sigma) else 1.0, 0.0)

    tally.detail = {"boundary_skipped": skipped}
    return tally.result()
