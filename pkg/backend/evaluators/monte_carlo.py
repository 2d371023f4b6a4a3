"""
Monte Carlo oracle for the conditional-variance (Reid) identities.

The CM itself is used as the classical covariance of the samples (not sigma/2);
every identity checked here (Schur complements, determinant ratios) is invariant
under that choice of convention.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
import pandas as pd
from sklearn.linear_model import LinearRegression

from backend.app import config
from backend.app.exceptions import DegenerateDataError, DomainError, IllConditionedError, PreconditionError
from backend.app.models import CovarianceMatrix, Party, SampleBatch

logger = logging.getLogger(__name__)

# (target, regressor) coordinate pairs for a 1+1 mode batch ordered (x_A, p_A, x_B, p_B)
_REGRESSION_PAIRS = {
    Party.B: [(2, 0), (3, 1)],
    Party.A: [(0, 2), (1, 3)],
}


def symmetric_sqrt(matrix: np.ndarray) -> np.ndarray:
    values, vectors = np.linalg.eigh(matrix)
    if values[0] <= 0:
        raise IllConditionedError(f"covariance is not positive definite (min eigenvalue {values[0]:.3e})")
    return (vectors * np.sqrt(values)) @ vectors.T


def block_generator(seed: int, block: int) -> np.random.Generator:
    """Counter-based generator for one block; independent of how blocks are split across workers."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def sample_gaussian(sigma: CovarianceMatrix, count: int, seed: int, workers: int | None = None) -> SampleBatch:
    """Zero-mean normal samples with covariance sigma, drawn in fixed-size seeded blocks."""
    if count <= 0:
        raise DomainError(f"sample count must be positive, got {count}")
    if seed < 0:
        raise DomainError(f"seed must be non-negative, got {seed}")
    # x = z sigma^{1/2} with z standard normal rows
    root = symmetric_sqrt(sigma.data)

    # Fixed block boundaries, so the stream does not depend on the worker count
    block_size = config.SAMPLING_PARAMS["block_size"]
    sizes = [min(block_size, count - start) for start in range(0, count, block_size)]

    def draw(block: int) -> np.ndarray:
        # each block has its own counter-based stream
        rng = block_generator(seed, block)
        return rng.standard_normal((sizes[block], sigma.dim)) @ root

    # pool.map keeps block order
    workers = workers or config.SAMPLING_PARAMS["workers"]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        blocks = list(pool.map(draw, range(len(sizes))))

    logger.debug("Drew %d samples in %d blocks with %d workers", count, len(sizes), workers)
    return SampleBatch(
        samples=np.vstack(blocks), seed=seed, count=count, n_modes_a=sigma.n_modes_a, n_modes_b=sigma.n_modes_b
    )


def empirical_covariance(batch: SampleBatch) -> np.ndarray:
    return batch.samples.T @ batch.samples / batch.count


def _require_two_mode_batch(batch: SampleBatch) -> None:
    if (batch.n_modes_a, batch.n_modes_b) != (1, 1):
        raise PreconditionError("conditional variances are estimated for 1+1 mode batches")
    if batch.count < config.SAMPLING_PARAMS["min_regression_count"]:
        raise PreconditionError(
            f"need at least {config.SAMPLING_PARAMS['min_regression_count']} samples, got {batch.count}"
        )


def _residuals(targets: np.ndarray, regressors: np.ndarray) -> np.ndarray:
    if np.min(regressors.var(axis=0)) < config.SAMPLING_PARAMS["degenerate_variance"]:
        raise DegenerateDataError("regressor has (near) zero variance")
    model = LinearRegression().fit(regressors, targets)
    return targets - model.predict(regressors)


def empirical_reid_product(batch: SampleBatch, steered: Party) -> float:
    """
    V_{x|x} V_{p|p} from OLS residual variances of x_steered on x_steering and
    p_steered on p_steering; converges to det M^{steered} for standard-form states.
    """
    _require_two_mode_batch(batch)
    product = 1.0
    for target, regressor in _REGRESSION_PAIRS[steered]:
        residual = _residuals(batch.samples[:, target], batch.samples[:, [regressor]])
        product *= float(residual.var())
    return product


def empirical_conditional_cm(batch: SampleBatch, steered: Party) -> np.ndarray:
    """Residual covariance of the steered pair regressed jointly on the steering pair (estimates M^steered)."""
    _require_two_mode_batch(batch)
    steered_cols = [2, 3] if steered is Party.B else [0, 1]
    steering_cols = [0, 1] if steered is Party.B else [2, 3]
    residual = _residuals(batch.samples[:, steered_cols], batch.samples[:, steering_cols])
    return np.cov(residual.T, bias=True)


def reid_product_standard_error(product: float, count: int) -> float:
    """Each residual variance has relative error sqrt(2/count); x and p estimates are independent."""
    return 2.0 * product / np.sqrt(count)


def batch_to_frame(batch: SampleBatch) -> pd.DataFrame:
    n_modes = batch.n_modes_a + batch.n_modes_b
    columns = [f"{quad}{party}{j}" for party, modes in (("a", batch.n_modes_a), ("b", batch.n_modes_b))
               for j in range(1, modes + 1) for quad in ("x_", "p_")]
    assert len(columns) == 2 * n_modes
    return pd.DataFrame(batch.samples, columns=columns)


def write_batch_csv(batch: SampleBatch, path: str | Path) -> None:
    batch_to_frame(batch).to_csv(path, index=False, float_format=f"%.{config.OUTPUT_DIGITS}g")
