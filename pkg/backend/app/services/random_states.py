"""
Random covariance matrices, symplectics and dilated Gaussian channels.
Every function takes an explicit seed or numpy Generator.
"""

import numpy as np
from scipy.linalg import qr

from backend.app import config
from backend.app.exceptions import DomainError
from backend.app.models import CovarianceMatrix, GaussianChannelDilation

SeedLike = int | np.random.Generator


def as_generator(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _xxpp_to_xpxp(n_modes: int) -> np.ndarray:
    """Permutation P with x_xpxp = P x_xxpp."""
    perm = np.zeros((2 * n_modes, 2 * n_modes))
    for j in range(n_modes):
        perm[2 * j, j] = 1.0
        perm[2 * j + 1, n_modes + j] = 1.0
    return perm


def random_interferometer(n_modes: int, seed: SeedLike) -> np.ndarray:
    """Haar-random n x n unitary via QR with phase correction."""
    rng = as_generator(seed)
    z = (rng.standard_normal((n_modes, n_modes)) + 1j * rng.standard_normal((n_modes, n_modes))) / np.sqrt(2.0)
    q, r = qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_orthogonal_symplectic(n_modes: int, seed: SeedLike) -> np.ndarray:
    """Passive (orthogonal and symplectic) transformation from a random unitary."""
    u = random_interferometer(n_modes, seed)
    o = np.block([[u.real, -u.imag], [u.imag, u.real]])
    perm = _xxpp_to_xpxp(n_modes)
    return perm @ o @ perm.T


def random_symplectic(n_modes: int, seed: SeedLike, squeeze_bound: float | None = None) -> np.ndarray:
    """Euler (Bloch-Messiah) form O1 Z O2 with single-mode squeezings r in [0, squeeze_bound]."""
    rng = as_generator(seed)
    bound = config.RANDOM_CM_PARAMS["squeeze_bound"] if squeeze_bound is None else squeeze_bound
    if bound < 0:
        raise DomainError(f"squeeze bound must be non-negative, got {bound}")
    r = rng.uniform(0.0, bound, n_modes)
    squeeze = np.diag(np.exp(np.column_stack([-r, r]).ravel()))
    return random_orthogonal_symplectic(n_modes, rng) @ squeeze @ random_orthogonal_symplectic(n_modes, rng)


def _thermal_diagonal(n_modes: int, temperature_scale: float, rng: np.random.Generator) -> np.ndarray:
    nu = rng.uniform(1.0, temperature_scale, n_modes)
    return np.diag(np.repeat(nu, 2))


def random_single_party_cm(
    n_modes: int, seed: SeedLike, temperature_scale: float | None = None, squeeze_bound: float | None = None
) -> np.ndarray:
    rng = as_generator(seed)
    scale = config.RANDOM_CM_PARAMS["temperature_scale"] if temperature_scale is None else temperature_scale
    if scale < 1:
        raise DomainError(f"temperature scale must be >= 1, got {scale}")
    s = random_symplectic(n_modes, rng, squeeze_bound)
    cm = s @ _thermal_diagonal(n_modes, scale, rng) @ s.T
    return (cm + cm.T) / 2


def random_cm(
    n_modes_a: int,
    n_modes_b: int,
    temperature_scale: float | None = None,
    seed: SeedLike = 0,
    squeeze_bound: float | None = None,
) -> CovarianceMatrix:
    """
    Random bona fide CM S D S^T with thermal diagonal D (entries in [1, temperature_scale])
    and a random global symplectic S.
    """
    if n_modes_a < 1 or n_modes_b < 1:
        raise DomainError(f"both parties need at least one mode, got ({n_modes_a}, {n_modes_b})")
    cm = random_single_party_cm(n_modes_a + n_modes_b, seed, temperature_scale, squeeze_bound)
    return CovarianceMatrix.from_array(cm, n_modes_a, n_modes_b)


def random_channel(
    n_system: int,
    ancilla_modes: int,
    seed: SeedLike,
    temperature_scale: float | None = None,
    squeeze_bound: float | None = None,
) -> GaussianChannelDilation:
    """Random Gaussian channel: mixed random ancilla and a random joint symplectic."""
    rng = as_generator(seed)
    ancilla = random_single_party_cm(ancilla_modes, rng, temperature_scale, squeeze_bound)
    joint = random_symplectic(n_system + ancilla_modes, rng, squeeze_bound)
    return GaussianChannelDilation.build(ancilla_cm=ancilla, symplectic=joint)
