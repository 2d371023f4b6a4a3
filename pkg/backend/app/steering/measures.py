"""
Gaussian steerability of bipartite covariance matrices under Gaussian measurements.

G^{A->B} = max{0, -sum_{nu_j < 1} ln nu_j} over the symplectic eigenvalues nu_j of the
Schur complement M^B = B - C^T A^{-1} C (and symmetrically for B->A). All logs are natural.
"""

import logging
from typing import NamedTuple

import numpy as np
from scipy.linalg import LinAlgError, solve

from backend.app import config
from backend.app.exceptions import DomainError, IllConditionedError, PreconditionError, StructuralError
from backend.app.models import CovarianceMatrix, Direction, MeasurementCM, Party, SteeringReport
from backend.app.services.symplectic import symplectic_eigenvalues

logger = logging.getLogger(__name__)


class ReidVariances(NamedTuple):
    x_b_given_x_a: float
    p_b_given_p_a: float
    x_a_given_x_b: float
    p_a_given_p_b: float


def _conditioned_blocks(sigma: CovarianceMatrix, steered: Party) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(conditioning block, steered block, cross block with rows on the conditioning party)."""
    if steered is Party.B:
        return sigma.a_block, sigma.b_block, sigma.c_block
    return sigma.b_block, sigma.a_block, sigma.c_block.T


def _solve_pos(matrix: np.ndarray, rhs: np.ndarray, what: str) -> np.ndarray:
    cond = np.linalg.cond(matrix)
    if not np.isfinite(cond) or cond > config.TOLERANCES["cond"]:
        raise IllConditionedError(f"{what} is numerically singular (condition number {cond:.3e})")
    try:
        return solve(matrix, rhs, assume_a="pos")
    except LinAlgError as e:
        raise IllConditionedError(f"{what} is not positive definite") from e


def schur_complement(sigma: CovarianceMatrix, steered: Party) -> np.ndarray:
    """M^B = B - C^T A^{-1} C for steered=B, M^A = A - C B^{-1} C^T for steered=A."""
    conditioning, target, cross = _conditioned_blocks(sigma, steered)
    m = target - cross.T @ _solve_pos(conditioning, cross, f"block of party {steered.other.value}")
    return (m + m.T) / 2


def measure_from_eigenvalues(nu: np.ndarray) -> float:
    sub_unity = nu[nu < 1.0]
    return max(0.0, float(-np.sum(np.log(sub_unity))))


def steering_measure(sigma: CovarianceMatrix, direction: Direction) -> float:
    return measure_from_eigenvalues(symplectic_eigenvalues(schur_complement(sigma, direction.steered)))


def renyi2_entropy(cm: CovarianceMatrix | np.ndarray) -> float:
    """S(sigma) = 1/2 ln det sigma."""
    matrix = cm.data if isinstance(cm, CovarianceMatrix) else np.asarray(cm, dtype=float)
    sign, logdet = np.linalg.slogdet(matrix)
    if sign <= 0:
        raise DomainError("Renyi-2 entropy needs a positive determinant")
    return 0.5 * float(logdet)


def coherent_information(sigma: CovarianceMatrix, direction: Direction) -> float:
    """I = S(steering party) - S(sigma); equals the measure (before clamping) when one mode is steered."""
    if sigma.modes(direction.steered) > 1:
        logger.warning(
            "coherent information for %s with %d steered modes is not the steering measure",
            direction.value,
            sigma.modes(direction.steered),
        )
    return renyi2_entropy(sigma.block(direction.steering)) - renyi2_entropy(sigma)


def _is_two_mode_standard_form(sigma: CovarianceMatrix, tol: float) -> bool:
    a, b, c = sigma.a_block, sigma.b_block, sigma.c_block
    scale = max(1.0, float(np.max(np.abs(sigma.data))))
    residue = max(abs(a[0, 1]), abs(b[0, 1]), abs(c[0, 1]), abs(c[1, 0]), abs(a[0, 0] - a[1, 1]), abs(b[0, 0] - b[1, 1]))
    return residue <= tol * scale


def _require_standard_form(sigma: CovarianceMatrix) -> None:
    if (sigma.n_modes_a, sigma.n_modes_b) != (1, 1):
        raise PreconditionError("Reid variances are defined here for two-mode states")
    if not _is_two_mode_standard_form(sigma, config.TOLERANCES["standard"]):
        raise PreconditionError(
            "CM is not in standard form; reduce it with twomode.to_standard_form / standard_form_cm first"
        )


def reid_variances(sigma: CovarianceMatrix) -> tuple[float, float]:
    """
    Products of conditional variances for homodyne inference:
    (V_{x_A|x_B} V_{p_A|p_B}, V_{x_B|x_A} V_{p_B|p_A}) = (det sigma / det B, det sigma / det A).
    """
    _require_standard_form(sigma)
    return conditional_variance_product(sigma, Party.A), conditional_variance_product(sigma, Party.B)


def reid_conditional_variances(sigma: CovarianceMatrix) -> ReidVariances:
    _require_standard_form(sigma)
    a, b = sigma.a_block[0, 0], sigma.b_block[0, 0]
    c, d = sigma.c_block[0, 0], sigma.c_block[1, 1]
    return ReidVariances(
        x_b_given_x_a=float(b - c**2 / a),
        p_b_given_p_a=float(b - d**2 / a),
        x_a_given_x_b=float(a - c**2 / b),
        p_a_given_p_b=float(a - d**2 / b),
    )


def conditional_variance_product(sigma: CovarianceMatrix, steered: Party) -> float:
    """det M^{steered} = det sigma / det(conditioning block)."""
    return float(np.exp(2.0 * (renyi2_entropy(sigma) - renyi2_entropy(sigma.block(steered.other)))))


def condition_on_measurement(
    sigma: CovarianceMatrix, measurement: MeasurementCM, measured: Party = Party.A
) -> np.ndarray:
    """
    Conditional CM of the unmeasured party after a Gaussian measurement with seed T:
    B^{R_A} = B - C^T (T + A)^{-1} C, independent of the outcome.
    """
    conditioning, target, cross = _conditioned_blocks(sigma, measured.other)
    if measurement.t.shape != conditioning.shape:
        raise StructuralError(
            f"measurement CM of shape {measurement.t.shape} does not match party {measured.value}"
        )
    m = target - cross.T @ _solve_pos(measurement.t + conditioning, cross, "T + A")
    return (m + m.T) / 2


def measured_steering_violation(
    sigma: CovarianceMatrix, measurement: MeasurementCM, measured: Party = Party.A
) -> float:
    """How far one fixed measurement's conditional CM falls below the vacuum bound."""
    return measure_from_eigenvalues(symplectic_eigenvalues(condition_on_measurement(sigma, measurement, measured)))


def steering_report(sigma: CovarianceMatrix, tol: float | None = None) -> SteeringReport:
    tol = config.tolerance("psd", tol)
    nu_b = symplectic_eigenvalues(schur_complement(sigma, Party.B))
    nu_a = symplectic_eigenvalues(schur_complement(sigma, Party.A))

    def marginal(nu: np.ndarray) -> bool:
        return bool(np.any((nu >= 1.0 - tol) & (nu < 1.0)))

    report = SteeringReport(
        g_a_to_b=measure_from_eigenvalues(nu_b),
        g_b_to_a=measure_from_eigenvalues(nu_a),
        nu_a=nu_a.tolist(),
        nu_b=nu_b.tolist(),
        steerable_a_to_b=bool(np.any(nu_b < 1.0)),
        steerable_b_to_a=bool(np.any(nu_a < 1.0)),
        reid_product_a=conditional_variance_product(sigma, Party.A),
        reid_product_b=conditional_variance_product(sigma, Party.B),
        marginal_a_to_b=marginal(nu_b),
        marginal_b_to_a=marginal(nu_a),
    )
    if report.marginal_a_to_b or report.marginal_b_to_a:
        logger.info("steering decided within tolerance of the boundary (tol=%g)", tol)
    return report
