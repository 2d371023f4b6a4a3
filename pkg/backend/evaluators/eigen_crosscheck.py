import numpy as np
from scipy.linalg import sqrtm

from backend.app.exceptions import DomainError, StructuralError
from backend.app.services.symplectic import symplectic_eigenvalues, symplectic_form


def dense_eigen_crosscheck(matrix) -> np.ndarray:
    """
    Symplectic eigenvalues from the Hermitian matrix sqrt(M) (i Omega) sqrt(M),
    independent of the Omega M route used by symplectic_eigenvalues.
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] % 2:
        raise StructuralError(f"expected an even square matrix, got shape {matrix.shape}")
    try:
        np.linalg.cholesky(matrix)
    except np.linalg.LinAlgError as e:
        raise DomainError("cross-check needs a positive-definite matrix") from e

    n_modes = matrix.shape[0] // 2
    root = np.real(sqrtm(matrix))
    hermitian = root @ (1j * symplectic_form(n_modes)) @ root
    values = np.linalg.eigvalsh((hermitian + hermitian.conj().T) / 2)
    return np.sort(np.abs(values[n_modes:]))


def max_eigen_deviation(matrix) -> float:
    """Largest relative disagreement between the two symplectic-eigenvalue routes."""
    dense = dense_eigen_crosscheck(matrix)
    analytic = symplectic_eigenvalues(matrix)
    return float(np.max(np.abs(dense - analytic) / np.maximum(1.0, analytic)))
