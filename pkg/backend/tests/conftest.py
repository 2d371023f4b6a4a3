import numpy as np
import pytest

from backend.app import config
from backend.app.models import CovarianceMatrix, RunConfig
from backend.app.services.symplectic import vacuum
from backend.app.steering.twomode import extremal_state, tmsv_state


@pytest.fixture(autouse=True)
def restore_tolerances():
    saved = dict(config.TOLERANCES)
    yield
    config.TOLERANCES.clear()
    config.TOLERANCES.update(saved)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def tmsv2() -> CovarianceMatrix:
    return tmsv_state(2.0)


@pytest.fixture
def extremal2() -> CovarianceMatrix:
    return extremal_state(2.0, 1e8)


@pytest.fixture
def product_state() -> CovarianceMatrix:
    return CovarianceMatrix.from_array(np.diag([3.0, 3.0, 2.0, 2.0]), 1, 1)


@pytest.fixture
def vacuum2() -> CovarianceMatrix:
    return vacuum(1, 1)


@pytest.fixture
def small_run_config() -> RunConfig:
    """Suite sizes small enough for the default (non-slow) test run."""
    return RunConfig.build(
        seed=3,
        suite_params={
            "ppt_nonsteerable": {"count": 200},
            "determinant_reduction": {"count": 50},
            "monotonicity": {"count": 50},
            "additivity": {"count": 50},
            "invariance": {"count": 20},
            "hierarchy": {"count": 20},
            "convexity": {"count": 20},
            "bounds": {"count": 200},
            "thresholds": {"count": 200},
            "key_rate": {"count": 100},
            "oracle_eigen": {"count": 50},
            "oracle_reid": {"states": 3, "samples": 50_000, "min_pass": 2},
        },
    )
