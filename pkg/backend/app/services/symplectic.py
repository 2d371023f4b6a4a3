"""
Symplectic linear algebra on covariance matrices.
Conventions: quadrature ordering (x_1, p_1, x_2, p_2, ...), Omega = (+) [[0, 1], [-1, 0]],
vacuum CM = identity, bona fide condition sigma + i Omega >= 0.
"""

import logging
import warnings
from typing import NamedTuple

import numpy as np
from scipy.linalg import block_diag

from backend.app import config
from backend.app.exceptions import DomainError, StructuralError, SymplecticAccuracyWarning
from backend.app.models import CovarianceMatrix, GaussianChannelDilation, SymplecticForm

logger = logging.getLogger(__name__)


class BonaFideCheck(NamedTuple):
    passed: bool
    marginal: bool
    margin: float


def symplectic_form(n_modes: int) -> np.ndarray:
    return SymplecticForm(n_modes=n_modes).matrix


def psd_tolerance(matrix: np.ndarray, tol: float | None = None) -> float:
    """PSD threshold widened to what double precision can resolve at this norm."""
    tol = config.tolerance("psd", tol)
    scale = config.SCALE_EPS_FACTOR * np.finfo(float).eps * np.linalg.norm(matrix, 2)
    return max(tol, float(scale))


def _even_square(matrix) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise StructuralError(f"expected a square matrix, got shape {matrix.shape}")
    if matrix.shape[0] == 0 or matrix.shape[0] % 2:
        raise StructuralError(f"phase-space matrices need even dimension, got {matrix.shape[0]}")
    return matrix


def bona_fide_margin(matrix) -> float:
    """Minimum eigenvalue of the Hermitian matrix M + i Omega."""
    matrix = _even_square(matrix)
    omega = symplectic_form(matrix.shape[0] // 2)
    return float(np.linalg.eigvalsh(matrix + 1j * omega)[0])


def is_bona_fide_matrix(matrix, tol: float | None = None) -> bool:
    matrix = _even_square(matrix)
    return bona_fide_margin(matrix) >= -psd_tolerance(matrix, tol)


def check_bona_fide(sigma: CovarianceMatrix, tol: float | None = None) -> BonaFideCheck:
    """Bona fide test with a 'marginal' flag for states within tolerance of the boundary."""
    threshold = psd_tolerance(sigma.data, tol)
    margin = bona_fide_margin(sigma.data)
    return BonaFideCheck(passed=margin >= -threshold, marginal=abs(margin) <= threshold, margin=margin)


def is_bona_fide(sigma: CovarianceMatrix, tol: float | None = None) -> bool:
    if not isinstance(sigma, CovarianceMatrix):
        raise StructuralError(f"expected a CovarianceMatrix, got {type(sigma).__name__}")
    return check_bona_fide(sigma, tol).passed


def symplectic_eigenvalues(matrix) -> np.ndarray:
    """
    Symplectic eigenvalues of a real symmetric positive-definite matrix, ascending.

    Computed as the moduli of the +-paired imaginary eigenvalues of Omega M.
    """
    matrix = _even_square(matrix)
    matrix = (matrix + matrix.T) / 2
    try:
        np.linalg.cholesky(matrix)
    except np.linalg.LinAlgError as e:
        raise DomainError("symplectic eigenvalues need a positive-definite matrix") from e

    n_modes = matrix.shape[0] // 2
    moduli = np.sort(np.abs(np.linalg.eigvals(symplectic_form(n_modes) @ matrix).imag))
    pairs = moduli.reshape(n_modes, 2)

    spread = np.abs(pairs[:, 1] - pairs[:, 0]) / np.maximum(1.0, pairs[:, 1])
    if np.max(spread) > config.TOLERANCES["pair"]:
        warnings.warn(
            f"symplectic eigenvalue pairs disagree by up to {np.max(spread):.3e}",
            SymplecticAccuracyWarning,
            stacklevel=2,
        )
    return pairs.mean(axis=1)


def partial_transpose(sigma: CovarianceMatrix) -> CovarianceMatrix:
    """Flip the sign of every momentum of subsystem B (p_B -> -p_B)."""
    signs = np.ones(sigma.dim)
    signs[sigma.split + 1 :: 2] = -1.0
    return CovarianceMatrix.from_array(sigma.data * np.outer(signs, signs), sigma.n_modes_a, sigma.n_modes_b)


def is_ppt(sigma: CovarianceMatrix, tol: float | None = None) -> bool:
    return is_bona_fide(partial_transpose(sigma), tol)


def is_symplectic(matrix, tol: float | None = None) -> bool:
    try:
        matrix = _even_square(matrix)
    except StructuralError:
        return False
    tol = config.tolerance("symp", tol)
    omega = symplectic_form(matrix.shape[0] // 2)
    scale = max(1.0, float(np.linalg.norm(matrix, 2)) ** 2)
    return float(np.max(np.abs(matrix @ omega @ matrix.T - omega))) <= tol * scale


def apply_local_symplectic(sigma: CovarianceMatrix, s_a, s_b) -> CovarianceMatrix:
    """(S_A (+) S_B) sigma (S_A (+) S_B)^T."""
    s_a = np.asarray(s_a, dtype=float)
    s_b = np.asarray(s_b, dtype=float)
    if s_a.shape != (sigma.split, sigma.split) or s_b.shape != (sigma.dim - sigma.split,) * 2:
        raise StructuralError(
            f"local symplectics of shape {s_a.shape}, {s_b.shape} do not match partition "
            f"({sigma.n_modes_a}, {sigma.n_modes_b})"
        )
    if not is_symplectic(s_a) or not is_symplectic(s_b):
        raise DomainError("local transformation is not symplectic")
    s = block_diag(s_a, s_b)
    return CovarianceMatrix.from_array(s @ sigma.data @ s.T, sigma.n_modes_a, sigma.n_modes_b)


def apply_channel_A(sigma: CovarianceMatrix, channel: GaussianChannelDilation) -> CovarianceMatrix:
    """Send subsystem A through a dilated Gaussian channel; B is untouched."""
    if channel.system_modes != sigma.n_modes_a:
        raise StructuralError(
            f"channel acts on {channel.system_modes} modes but A has {sigma.n_modes_a}"
        )
    split = sigma.split
    k = channel.ancilla_cm.shape[0]
    dim_b = sigma.dim - split

    # Joint CM ordered (A, ancilla, B)
    extended = block_diag(sigma.a_block, channel.ancilla_cm, sigma.b_block)
    extended[:split, split + k :] = sigma.c_block
    extended[split + k :, :split] = sigma.c_block.T

    # Dilation symplectic on (A, ancilla), identity on B
    full = block_diag(channel.symplectic, np.eye(dim_b))
    evolved = full @ extended @ full.T

    # Trace out the ancilla
    keep = np.r_[0:split, split + k : split + k + dim_b]
    logger.debug("Applied %d-mode dilation to A (%d ancilla modes)", channel.system_modes, channel.ancilla_modes)
    return CovarianceMatrix.from_array(evolved[np.ix_(keep, keep)], sigma.n_modes_a, sigma.n_modes_b)


def direct_sum(first: CovarianceMatrix, second: CovarianceMatrix) -> CovarianceMatrix:
    """CM of a tensor product: A = A1 (+) A2 and B = B1 (+) B2."""
    joint = block_diag(first.data, second.data)
    offset = first.dim
    order = np.r_[
        0 : first.split,
        offset : offset + second.split,
        first.split : first.dim,
        offset + second.split : offset + second.dim,
    ]
    return CovarianceMatrix.from_array(
        joint[np.ix_(order, order)],
        first.n_modes_a + second.n_modes_a,
        first.n_modes_b + second.n_modes_b,
    )


def swap_parties(sigma: CovarianceMatrix) -> CovarianceMatrix:
    order = np.r_[sigma.split : sigma.dim, 0 : sigma.split]
    return CovarianceMatrix.from_array(sigma.data[np.ix_(order, order)], sigma.n_modes_b, sigma.n_modes_a)


def vacuum(n_modes_a: int = 1, n_modes_b: int = 1) -> CovarianceMatrix:
    return CovarianceMatrix.from_array(np.eye(2 * (n_modes_a + n_modes_b)), n_modes_a, n_modes_b)


def rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [-s, c]])


def squeezer(z: float) -> np.ndarray:
    if z <= 0:
        raise DomainError(f"squeezing factor must be positive, got {z}")
    return np.diag([z, 1.0 / z])


def beamsplitter(theta: float) -> np.ndarray:
    """Two-mode beamsplitter with transmissivity cos^2(theta)."""
    c, s = np.cos(theta), np.sin(theta)
    eye = np.eye(2)
    return np.block([[c * eye, s * eye], [-s * eye, c * eye]])


def mode_swap() -> np.ndarray:
    eye, zero = np.eye(2), np.zeros((2, 2))
    return np.block([[zero, eye], [eye, zero]])
