# Steering versus Renyi-2 entanglement for two-mode states: closed forms on the
# extremal and pure families, the sandwich/asymmetry bounds on random states,
# and physicality of the extremal family across its parameter range.

import numpy as np

from backend.app import config
from backend.app.models import Direction, RunConfig, SuiteResult
from backend.app.services.random_states import random_cm
from backend.app.services.symplectic import is_bona_fide
from backend.app.steering.measures import renyi2_entropy, steering_measure
from backend.app.steering.twomode import LN2, entanglement_renyi2, extremal_state, steering_bounds_check, tmsv_state
from backend.pipelines.steps import Tally, progress_range, suite_rng

NAME = "bounds"
ASYMPTOTIC_TOLERANCE = 1e-4
PURE_TOLERANCE = 1e-10
ASYMMETRY_TOLERANCE = 1e-9
LN3 = float(np.log(3.0))


def _check_extremal(tally: Tally, s: float, a: float) -> None:
    sigma = extremal_state(s, a)
    g_ab = steering_measure(sigma, Direction.A_TO_B)
    g_ba = steering_measure(sigma, Direction.B_TO_A)
    entanglement = np.log(2.0 * s + 1.0)
    tally.check(abs(g_ab - np.log(s)), ASYMPTOTIC_TOLERANCE)
    tally.check(abs(g_ba - np.log(s + 1.0)), ASYMPTOTIC_TOLERANCE)
    # lower boundary G = ln((e^E - 1) / 2) is saturated
    tally.check(abs(g_ab - np.log(0.5 * np.expm1(entanglement))), ASYMPTOTIC_TOLERANCE)

    mirrored = extremal_state(s, a, swapped=True)
    tally.check(abs(steering_measure(mirrored, Direction.B_TO_A) - g_ab), ASYMPTOTIC_TOLERANCE)
    tally.check(abs(steering_measure(mirrored, Direction.A_TO_B) - g_ba), ASYMPTOTIC_TOLERANCE)
    if entanglement > LN3:
        # entanglement above ln 3 forces steering both ways
        tally.check(0.0 if min(g_ab, g_ba) > 0 else 1.0, 0.0)


def _check_pure(tally: Tally, a: float) -> None:
    sigma = tmsv_state(a)
    entanglement = entanglement_renyi2(sigma).value
    for direction in Direction:
        tally.check(abs(steering_measure(sigma, direction) - entanglement), PURE_TOLERANCE)


def _check_extremal_physicality(tally: Tally, s: float, a_max: float) -> None:
    for a in np.geomspace(s, a_max, 8):
        sigma = extremal_state(s, a)
        tally.check(0.0 if is_bona_fide(sigma) else 1.0, 0.0)
        tally.check(max(0.0, -renyi2_entropy(sigma)), config.TOLERANCES["psd"])


def run(run_config: RunConfig, progress: bool = True) -> SuiteResult:
    params = run_config.suite(NAME)
    rng = suite_rng(run_config, NAME)
    tally = Tally(NAME)

    for s in params["s_values"]:
        _check_extremal(tally, s, run_config.a)
        _check_extremal_physicality(tally, s, run_config.a)
    for a in params["pure_a_values"]:
        _check_pure(tally, a)

    defects = 0
    max_asymmetry = 0.0
    for _ in progress_range(params["count"], NAME, progress):
        report = steering_bounds_check(random_cm(1, 1, seed=rng))
        defects += int(report.defect)
        tally.check(float(report.defect), 0.0)
        max_asymmetry = max(max_asymmetry, report.asymmetry)
        tally.check(report.asymmetry - LN2, ASYMMETRY_TOLERANCE)

    tally.detail = {"defects": defects, "max_asymmetry": max_asymmetry}
    return tally.result()
