import os
from dotenv import load_dotenv

load_dotenv()

# Environment variable naming a default JSON RunConfig file for the CLI
CONFIG_ENV_VAR = "STEERING_CONFIG"

# Numerical tolerances, read at call time so overrides apply everywhere
TOLERANCES = {
    "sym": 1e-10,      # symmetry of a CM
    "psd": 1e-9,       # PSD / symplectic-eigenvalue thresholds
    "symp": 1e-9,      # S Omega S^T = Omega
    "pair": 1e-8,      # agreement of +-paired eigenvalue moduli
    "cond": 1e12,      # max condition number of a conditioning block
    "defect": 1e-8,    # slack before a bound violation counts as a library defect
    "standard": 1e-9,  # off-diagonal entries allowed in a "standard form" CM
}

# PSD tests widen to max(tol, SCALE_EPS_FACTOR * eps * ||sigma||_2) for large-norm CMs
SCALE_EPS_FACTOR = 64.0

# For random covariance matrices
RANDOM_CM_PARAMS = {
    "temperature_scale": 3.0,
    "squeeze_bound": 2.0,
}

# Finite "a" used in place of the a -> infinity limit of the extremal family
EXTREMAL_DEFAULT_A = 1e8

# Homodyne detection is a general-dyne seed diag(t, 1/t) with small t
HOMODYNE_SQUEEZING = 1e-6

# For Monte Carlo sampling
SAMPLING_PARAMS = {
    "block_size": 65536,   # samples per counter-based RNG block
    "workers": 1,
    "min_regression_count": 10_000,
    "degenerate_variance": 1e-12,
}

# Sample counts for the verify suites (defaults match the acceptance runs)
SUITE_PARAMS = {
    "ppt_nonsteerable": {"count": 10_000, "partitions": [(1, 1), (2, 1), (1, 2), (2, 2)]},
    "determinant_reduction": {"count": 1_000, "max_modes_a": 3},
    "monotonicity": {"count": 1_000, "max_ancilla_modes": 2, "channel_squeeze_bound": 1.0},
    "additivity": {"count": 1_000},
    "invariance": {"count": 200},
    "hierarchy": {"count": 200, "max_modes_a": 3},
    "convexity": {"count": 200, "weights": [0.25, 0.5, 0.75]},
    "bounds": {"count": 10_000, "s_values": [1.0, 2.0, 5.0, 10.0], "pure_a_values": [1.5, 2.0, 5.0]},
    "thresholds": {"count": 1_000},
    "key_rate": {"count": 1_000},
    "oracle_eigen": {"count": 1_000, "max_modes": 4},
    "oracle_reid": {"states": 20, "samples": 1_000_000, "sigmas": 3.0, "min_pass": 18},
}

# Defaults for the purity-region and steering-bounds scans
SCAN_PARAMS = {
    "eta": 0.5,
    "mu_grid": (0.005, 1.0, 200),
    "s_grid": (1.0, 10.0, 10),
    "a": EXTREMAL_DEFAULT_A,
}

# Significant digits for every numeric writer
OUTPUT_DIGITS = 17


def override_tolerances(**overrides: float) -> None:
    """Override global tolerances in place (CLI --tol, config files)."""
    for key, value in overrides.items():
        if key not in TOLERANCES:
            raise KeyError(f"Unknown tolerance '{key}'")
        TOLERANCES[key] = float(value)


def tolerance(key: str, override: float | None = None) -> float:
    return TOLERANCES[key] if override is None else float(override)


def default_config_path() -> str | None:
    return os.getenv(CONFIG_ENV_VAR)
