"""
Full single-state report used by the CLI `report` command.
"""

import logging

from backend.app.exceptions import UnphysicalStateError
from backend.app.models import CovarianceMatrix
from backend.app.services.symplectic import check_bona_fide, is_ppt
from backend.app.steering import twomode
from backend.app.steering.measures import steering_report

logger = logging.getLogger(__name__)


def require_bona_fide(sigma: CovarianceMatrix, tol: float | None = None) -> None:
    check = check_bona_fide(sigma, tol)
    if not check.passed:
        raise UnphysicalStateError(
            f"bona fide violation: minimum eigenvalue of sigma + i Omega is {check.margin:.6g}"
        )
    if check.marginal:
        logger.warning("state lies within tolerance of the bona fide boundary (margin %.3e)", check.margin)


def build_report(sigma: CovarianceMatrix, bits: bool = False, tol: float | None = None) -> dict:
    """Steering measures, eigenvalues, Reid products, classification, key rates and entanglement."""
    require_bona_fide(sigma, tol)
    steering = steering_report(sigma, tol)

    report = {
        "partition": [sigma.n_modes_a, sigma.n_modes_b],
        "steering": steering.model_dump(mode="json"),
        "marginal": {"a_to_b": steering.marginal_a_to_b, "b_to_a": steering.marginal_b_to_a},
        "ppt": is_ppt(sigma, tol),
    }

    if (sigma.n_modes_a, sigma.n_modes_b) == (1, 1):
        report["purity"] = twomode.purity_profile(sigma).model_dump()
        report["classification"] = twomode.classify_state(sigma).model_dump(mode="json")
        report["standard_form"] = twomode.to_standard_form(sigma).model_dump()
        report["key_rate"] = twomode.key_rates(sigma, bits=bits).model_dump()
        report["entanglement"] = twomode.entanglement_renyi2(sigma).model_dump(mode="json")
    else:
        logger.info("two-mode sections skipped for partition (%d, %d)", sigma.n_modes_a, sigma.n_modes_b)

    return report
