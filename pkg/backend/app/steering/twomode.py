"""
Two-mode specialisation: standard form, purity-based classification,
pure (two-mode squeezed) and extremal families, entanglement/steering bounds
and the one-sided device-independent key rate.
"""

import logging
from typing import NamedTuple, Optional

import numpy as np
from pydantic import ValidationError

from backend.app import config
from backend.app.exceptions import DomainError, InconsistentInvariantsError, StructuralError
from backend.app.models import (
    BoundsCheck,
    CovarianceMatrix,
    Direction,
    EntanglementEstimate,
    EntanglementFlag,
    InequalityCheck,
    KeyRateReport,
    Physicality,
    PurityProfile,
    RegionLabel,
    Separability,
    StandardFormParams,
)
from backend.app.services.symplectic import is_bona_fide, is_ppt, swap_parties
from backend.app.steering.measures import renyi2_entropy, steering_measure, steering_report

logger = logging.getLogger(__name__)

LN2 = float(np.log(2.0))

# Integer codes used by the vectorised classifier
SEPARABILITY_CODES = {0: Separability.SEPARABLE, 1: Separability.COEXISTENCE, 2: Separability.ENTANGLED}


class Thresholds(NamedTuple):
    eta_0: np.ndarray | float
    eta_s: np.ndarray | float
    eta_e: np.ndarray | float


class GridLabels(NamedTuple):
    physical: np.ndarray
    separability: np.ndarray  # codes of SEPARABILITY_CODES, -1 where unphysical
    steer_a_to_b: np.ndarray
    steer_b_to_a: np.ndarray


def _require_two_mode(sigma: CovarianceMatrix) -> None:
    if (sigma.n_modes_a, sigma.n_modes_b) != (1, 1):
        raise StructuralError(f"expected a 1+1 mode CM, got ({sigma.n_modes_a}, {sigma.n_modes_b})")


def _params(a, b, c, d) -> StandardFormParams:
    try:
        return StandardFormParams(a=float(a), b=float(b), c=float(c), d=float(d))
    except ValidationError as e:
        raise InconsistentInvariantsError(str(e)) from e


def standard_form_cm(params: StandardFormParams) -> CovarianceMatrix:
    a, b, c, d = params.a, params.b, params.c, params.d
    matrix = np.array(
        [
            [a, 0.0, c, 0.0],
            [0.0, a, 0.0, d],
            [c, 0.0, b, 0.0],
            [0.0, d, 0.0, b],
        ]
    )
    return CovarianceMatrix.from_array(matrix, 1, 1)


def _is_standard_form(sigma: CovarianceMatrix) -> bool:
    data = sigma.data
    scale = max(1.0, float(np.max(np.abs(data))))
    residue = max(
        abs(data[0, 1]), abs(data[2, 3]), abs(data[0, 3]), abs(data[1, 2]),
        abs(data[0, 0] - data[1, 1]), abs(data[2, 2] - data[3, 3]),
    )
    return residue <= config.TOLERANCES["standard"] * scale


def _williamson_normalizer(block: np.ndarray) -> tuple[float, np.ndarray]:
    """Single-mode Williamson form: S with S block S^T = nu I, nu = sqrt(det block)."""
    eigenvalues, vectors = np.linalg.eigh(block)
    if eigenvalues[0] <= 0:
        raise InconsistentInvariantsError("local blocks must be positive definite")
    nu = float(np.sqrt(eigenvalues[0] * eigenvalues[1]))
    # sqrt(nu) block^{-1/2} has unit determinant, hence is symplectic
    return nu, (vectors * np.sqrt(nu / eigenvalues)) @ vectors.T


def to_standard_form(sigma: CovarianceMatrix) -> StandardFormParams:
    """
    Standard-form parameters (a, b, c, d) with c >= |d| and d <= 0 when det C < 0.
    Reached with local symplectics: Williamson form of each local block, then
    local rotations diagonalising the cross block.
    """
    _require_two_mode(sigma)
    # bona fide is a local symplectic invariant; decide it at the input's own scale
    if not is_bona_fide(sigma):
        raise InconsistentInvariantsError("CM is not bona fide, so it has no physical standard form")

    if _is_standard_form(sigma):
        # Already diagonal: only reorder/sign-normalise (local pi/2 and pi rotations)
        c0, d0 = sigma.c_block[0, 0], sigma.c_block[1, 1]
        big, small = max(abs(c0), abs(d0)), min(abs(c0), abs(d0))
        return _params(sigma.a_block[0, 0], sigma.b_block[0, 0], big, np.sign(c0 * d0) * small)

    a, s_a = _williamson_normalizer(sigma.a_block)
    b, s_b = _williamson_normalizer(sigma.b_block)
    cross = s_a @ sigma.c_block @ s_b.T

    # a I and b I are rotation invariant, so the SVD rotations finish the job;
    # reflections are not symplectic and only move the sign of det C onto d
    singular = np.linalg.svd(cross, compute_uv=False)
    c = float(singular[0])
    d = float(singular[1]) * (-1.0 if np.linalg.det(sigma.c_block) < 0 else 1.0)

    return _params(a, b, c, d)


def purity_profile(sigma: CovarianceMatrix) -> PurityProfile:
    _require_two_mode(sigma)
    mu_a = float(np.exp(-renyi2_entropy(sigma.a_block)))
    mu_b = float(np.exp(-renyi2_entropy(sigma.b_block)))
    mu = float(np.exp(-renyi2_entropy(sigma)))
    return PurityProfile(mu_a=mu_a, mu_b=mu_b, mu=mu, eta=mu_a * mu_b / mu)


def region_thresholds(mu_a, mu_b) -> Thresholds:
    """eta_0 (physicality), eta_s (separability) and eta_e (entanglement) thresholds."""
    mu_a = np.asarray(mu_a, dtype=float)
    mu_b = np.asarray(mu_b, dtype=float)
    return Thresholds(
        eta_0=mu_a * mu_b + np.abs(mu_a - mu_b),
        eta_s=mu_a + mu_b - mu_a * mu_b,
        eta_e=np.sqrt(mu_a**2 + mu_b**2 - mu_a**2 * mu_b**2),
    )


def classify_grid(mu_a, mu_b, eta, tol: float | None = None) -> GridLabels:
    """Vectorised classification over arrays of (mu_A, mu_B, eta)."""
    tol = config.tolerance("psd", tol)
    mu_a, mu_b, eta = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (mu_a, mu_b, eta)))
    th = region_thresholds(mu_a, mu_b)

    physical = (eta >= th.eta_0 - tol) & (eta <= 1.0 + tol) & (mu_a > 0) & (mu_b > 0) & (mu_a <= 1.0 + tol) & (mu_b <= 1.0 + tol)
    separability = np.where(eta >= th.eta_s, 0, np.where(eta < th.eta_e, 2, 1))
    separability = np.where(physical, separability, -1)
    return GridLabels(
        physical=physical,
        separability=separability,
        steer_a_to_b=physical & (eta < mu_b),
        steer_b_to_a=physical & (eta < mu_a),
    )


def steering_flags(profile: PurityProfile) -> tuple[bool, bool]:
    """(A->B, B->A) steerability from purities alone: eta < mu_B and eta < mu_A."""
    return bool(profile.eta < profile.mu_b), bool(profile.eta < profile.mu_a)


def classify_two_mode(profile: PurityProfile) -> RegionLabel:
    labels = classify_grid(profile.mu_a, profile.mu_b, profile.eta)
    if not labels.physical:
        return RegionLabel(physicality=Physicality.UNPHYSICAL)
    return RegionLabel(
        physicality=Physicality.PHYSICAL,
        separability=SEPARABILITY_CODES[int(labels.separability)],
        steer_a_to_b=bool(labels.steer_a_to_b),
        steer_b_to_a=bool(labels.steer_b_to_a),
    )


def classify_state(sigma: CovarianceMatrix) -> RegionLabel:
    """Purity-level label plus the state-level PPT verdict (necessary and sufficient for 1+1 modes)."""
    label = classify_two_mode(purity_profile(sigma))
    if label.physicality is Physicality.UNPHYSICAL:
        return label
    return label.model_copy(update={"ppt_separable": is_ppt(sigma)})


def witness_state(profile: PurityProfile) -> Optional[CovarianceMatrix]:
    """
    Symmetric standard-form CM (c = -d) with the given purities, or None if no
    physical state has them. At fixed purities c = -d minimises a^2 + b^2 + 2cd,
    so it is physical whenever any state with these purities is.
    """
    if max(profile.mu_a, profile.mu_b, profile.mu) > 1.0:
        return None
    a, b = 1.0 / profile.mu_a, 1.0 / profile.mu_b
    c_squared = a * b - 1.0 / profile.mu
    if c_squared < -config.TOLERANCES["psd"]:
        return None
    c = np.sqrt(max(c_squared, 0.0))
    sigma = standard_form_cm(_params(a, b, c, -c))
    return sigma if is_bona_fide(sigma) else None


def tmsv_state(a: float) -> CovarianceMatrix:
    """Pure two-mode squeezed state: b = a, c = -d = sqrt(a^2 - 1)."""
    if a < 1:
        raise DomainError(f"two-mode squeezed states need a >= 1, got {a}")
    c = np.sqrt(a**2 - 1.0)
    return standard_form_cm(_params(a, a, c, -c))


def extremal_state(s: float, a: float | None = None, swapped: bool = False) -> CovarianceMatrix:
    """
    Extremal family: b = a - 1 + a/s, c = -d = sqrt((a-1)(s+1)(a/s)), a >= s >= 1.
    The closed forms (G^{A->B} = ln s, G^{B->A} = ln(s+1), E = ln(2s+1)) hold as a -> inf;
    `swapped` returns the A<->B mirror state.
    """
    a = config.EXTREMAL_DEFAULT_A if a is None else a
    if not (a >= s >= 1):
        raise DomainError(f"extremal states need a >= s >= 1, got s={s}, a={a}")
    b = a - 1.0 + a / s
    c = np.sqrt((a - 1.0) * (s + 1.0) * (a / s))
    sigma = standard_form_cm(_params(a, b, c, -c))
    return swap_parties(sigma) if swapped else sigma


def _extremal_parameter(params: StandardFormParams) -> Optional[float]:
    a, b, c, d = params.a, params.b, params.c, params.d
    rtol = 1e-7
    if not np.isclose(d, -c, rtol=rtol, atol=1e-12):
        return None
    denom = b - a + 1.0
    if denom <= 0:
        return None
    s = a / denom
    if s < 1.0 - rtol or a < s * (1.0 - rtol):
        return None
    if not np.isclose(c**2, (a - 1.0) * (s + 1.0) * (a / s), rtol=rtol, atol=1e-12):
        return None
    return max(float(s), 1.0)


def entanglement_renyi2(sigma: CovarianceMatrix) -> EntanglementEstimate:
    """
    Gaussian Renyi-2 entanglement where a closed form exists (pure states, extremal family);
    otherwise only the steering-derived lower bound is reported.
    """
    _require_two_mode(sigma)
    g_ab = steering_measure(sigma, Direction.A_TO_B)
    g_ba = steering_measure(sigma, Direction.B_TO_A)
    lower = max(g_ab, g_ba)

    tol = max(config.TOLERANCES["psd"], config.SCALE_EPS_FACTOR * np.finfo(float).eps * np.linalg.cond(sigma.data))
    if abs(np.expm1(2.0 * renyi2_entropy(sigma))) <= tol:
        value = renyi2_entropy(sigma.a_block)
        return EntanglementEstimate(flag=EntanglementFlag.EXACT, value=value, lower=lower, upper=value)

    # E is a local symplectic invariant: match the family on the standard form
    try:
        params = to_standard_form(sigma)
    except InconsistentInvariantsError as e:
        logger.warning("no standard form, reporting bounds only: %s", e)
        return EntanglementEstimate(flag=EntanglementFlag.BOUNDS_ONLY, lower=lower)

    mirrored = _params(params.b, params.a, params.c, params.d)
    for candidate in (params, mirrored):
        s = _extremal_parameter(candidate)
        if s is not None:
            value = float(np.log(2.0 * s + 1.0))
            return EntanglementEstimate(flag=EntanglementFlag.EXACT_ASYMPTOTIC, value=value, lower=lower, upper=value)

    return EntanglementEstimate(flag=EntanglementFlag.BOUNDS_ONLY, lower=lower)


def _inequality(name: str, lhs: float, rhs: float, precision: float = 0.0) -> InequalityCheck:
    """lhs <= rhs, passing up to the defect tolerance (relative above unit size) plus `precision`."""
    slack = float(rhs - lhs)
    allowed = config.TOLERANCES["defect"] * max(1.0, abs(lhs), abs(rhs)) + precision
    return InequalityCheck(name=name, lhs=float(lhs), rhs=float(rhs), slack=slack, passed=slack >= -allowed)


def _measure_precision(sigma: CovarianceMatrix, nu: np.ndarray) -> float:
    """Rounding floor of G: eps ||sigma|| absolute error on each nu, divided by the smallest nu."""
    smallest = min(1.0, float(np.min(nu)))
    return config.SCALE_EPS_FACTOR * np.finfo(float).eps * float(np.linalg.norm(sigma.data, 2)) / smallest


def _log_expm1_clamped(g: float) -> float:
    """max{0, ln(e^g - 1)}."""
    excess = np.expm1(g)
    return float(max(0.0, np.log(excess))) if excess > 0 else 0.0


def steering_bounds_check(sigma: CovarianceMatrix) -> BoundsCheck:
    _require_two_mode(sigma)
    report = steering_report(sigma)
    g_ab, g_ba = report.g_a_to_b, report.g_b_to_a
    precision = _measure_precision(sigma, np.array(report.nu_a + report.nu_b))

    checks = [
        _inequality("sandwich_lower", _log_expm1_clamped(g_ab), g_ba, precision),
        _inequality("sandwich_upper", g_ba, float(np.log(np.exp(g_ab) + 1.0)), precision),
        _inequality("asymmetry_ceiling", abs(g_ba - g_ab), LN2, precision),
    ]

    estimate = entanglement_renyi2(sigma)
    if estimate.value is not None:
        e = estimate.value
        half_excess = 0.5 * np.expm1(e)
        entanglement_floor = max(0.0, float(np.log(half_excess))) if half_excess > 0 else 0.0
        checks.append(_inequality("steering_below_entanglement", max(g_ab, g_ba), e, precision))
        checks.append(_inequality("steering_above_entanglement_floor", entanglement_floor, min(g_ab, g_ba), precision))

    result = BoundsCheck(
        g_a_to_b=g_ab,
        g_b_to_a=g_ba,
        asymmetry=abs(g_ba - g_ab),
        checks=checks,
        defect=not all(check.passed for check in checks),
    )
    if result.defect:
        failed = [check.name for check in checks if not check.passed]
        logger.error("Library defect: steering bounds violated beyond tolerance: %s", failed)
    return result


def key_rate_bound(g_b_to_a: float) -> float:
    """Guaranteed one-sided device-independent key rate K >= max{0, G + ln 2 - 1} (nats)."""
    if g_b_to_a < 0:
        raise DomainError(f"steering measure must be non-negative, got {g_b_to_a}")
    return max(0.0, g_b_to_a + LN2 - 1.0)


def key_rate_from_reid(product: float) -> float:
    """Same bound in terms of the conditional-variance product: max{0, ln(2 / (e sqrt(V V)))}."""
    if product <= 0:
        raise DomainError(f"conditional variance product must be positive, got {product}")
    return max(0.0, LN2 - 1.0 - 0.5 * float(np.log(product)))


def nats_to_bits(value: float) -> float:
    return value / LN2


def key_rates(sigma: CovarianceMatrix, bits: bool = False) -> KeyRateReport:
    """Direct reconciliation uses G^{B->A}; reverse reconciliation uses G^{A->B}."""
    direct = key_rate_bound(steering_measure(sigma, Direction.B_TO_A))
    reverse = key_rate_bound(steering_measure(sigma, Direction.A_TO_B))
    if bits:
        return KeyRateReport(direct=nats_to_bits(direct), reverse=nats_to_bits(reverse), units="bits")
    return KeyRateReport(direct=direct, reverse=reverse)
