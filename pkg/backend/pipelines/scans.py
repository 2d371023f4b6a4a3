"""
Grid scans: the purity-region map at fixed eta and the steering-versus-entanglement
curves for the extremal and pure families.
"""

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
import pandas as pd

from backend.app import config
from backend.app.exceptions import ConfigError
from backend.app.models import Direction, Physicality, PurityProfile, RunConfig
from backend.app.steering.measures import steering_measure
from backend.app.steering.twomode import (
    SEPARABILITY_CODES,
    classify_grid,
    entanglement_renyi2,
    extremal_state,
    tmsv_state,
    witness_state,
)

logger = logging.getLogger(__name__)

REGION_COLUMNS = [
    "mu_a", "mu_b", "eta", "physicality", "separability",
    "steer_a_to_b", "steer_b_to_a", "g_a_to_b", "g_b_to_a", "g_max",
]
BOUNDS_COLUMNS = [
    "family", "parameter", "entanglement", "g_a_to_b", "g_b_to_a",
    "lower_boundary", "upper_boundary", "sandwich_lower", "sandwich_upper",
]


def _overlay_row(mu_a: float, mu_b_values: np.ndarray, physical_row: np.ndarray, eta: float) -> np.ndarray:
    """(g_a_to_b, g_b_to_a) of the witness state per cell; NaN where no witness exists."""
    overlay = np.full((len(mu_b_values), 2), np.nan)
    for j, mu_b in enumerate(mu_b_values):
        if not physical_row[j]:
            continue
        sigma = witness_state(PurityProfile.from_eta(mu_a, mu_b, eta))
        if sigma is None:
            continue
        overlay[j] = steering_measure(sigma, Direction.A_TO_B), steering_measure(sigma, Direction.B_TO_A)
    return overlay


def scan_regions(run_config: RunConfig, workers: int | None = None) -> pd.DataFrame:
    """Classify a (mu_A, mu_B) grid at fixed eta; rows in row-major order with mu_A outer."""
    eta = run_config.eta
    if not 0.0 < eta <= 1.0:
        raise ConfigError(f"eta must lie in (0, 1], got {eta}")
    grid = run_config.mu_grid
    if grid.min <= 0.0 or grid.max > 1.0:
        raise ConfigError(f"purity grid must lie in (0, 1], got [{grid.min}, {grid.max}]")

    # Labels are closed-form in the purities, so the whole grid is classified at once
    mu = grid.values()
    mu_a, mu_b = np.meshgrid(mu, mu, indexing="ij")
    labels = classify_grid(mu_a, mu_b, eta)

    # The G overlay needs a concrete state per cell: one task per mu_A row
    workers = workers or run_config.workers
    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(lambda i: _overlay_row(mu[i], mu, labels.physical[i], eta), range(len(mu))))
    overlay = np.stack(rows).reshape(-1, 2)

    # Row-major with mu_A outer, matching the meshgrid ravel
    physical = labels.physical.ravel()
    frame = pd.DataFrame(
        {
            "mu_a": mu_a.ravel(),
            "mu_b": mu_b.ravel(),
            "eta": np.full(physical.shape, eta),
            "physicality": np.where(physical, Physicality.PHYSICAL.value, Physicality.UNPHYSICAL.value),
            "separability": [
                SEPARABILITY_CODES[code].value if code >= 0 else None for code in labels.separability.ravel()
            ],
            "steer_a_to_b": labels.steer_a_to_b.ravel(),
            "steer_b_to_a": labels.steer_b_to_a.ravel(),
            "g_a_to_b": overlay[:, 0],
            "g_b_to_a": overlay[:, 1],
            "g_max": np.fmax(overlay[:, 0], overlay[:, 1]),
        },
        columns=REGION_COLUMNS,
    )
    logger.info("Region scan: %d cells, %d physical", len(frame), int(physical.sum()))
    return frame


def _bounds_row(family: str, parameter: float, entanglement: float, g_ab: float, g_ba: float) -> dict:
    lower = float(np.log(0.5 * np.expm1(entanglement))) if np.expm1(entanglement) > 2.0 else 0.0
    return {
        "family": family,
        "parameter": parameter,
        "entanglement": entanglement,
        "g_a_to_b": g_ab,
        "g_b_to_a": g_ba,
        "lower_boundary": lower,
        "upper_boundary": entanglement,
        "sandwich_lower": max(0.0, float(np.log(np.expm1(g_ab)))) if g_ab > 0 else 0.0,
        "sandwich_upper": float(np.log(np.exp(g_ab) + 1.0)),
    }


def scan_bounds(run_config: RunConfig) -> pd.DataFrame:
    """
    Extremal family (and its A<->B mirror) at finite a against its asymptotic
    Renyi-2 entanglement ln(2s+1), plus pure states with the same entanglement.
    """
    grid = run_config.s_grid
    if grid.min < 1.0:
        raise ConfigError(f"extremal parameter s must be >= 1, got {grid.min}")
    if run_config.a < grid.max:
        raise ConfigError(f"a = {run_config.a} must be at least the largest s = {grid.max}")

    rows = []
    for s in grid.values():
        s = float(s)
        entanglement = float(np.log(2.0 * s + 1.0))
        for family, swapped in (("extremal", False), ("extremal_swapped", True)):
            sigma = extremal_state(s, run_config.a, swapped=swapped)
            rows.append(
                _bounds_row(
                    family, s, entanglement,
                    steering_measure(sigma, Direction.A_TO_B), steering_measure(sigma, Direction.B_TO_A),
                )
            )
        pure = tmsv_state(2.0 * s + 1.0)
        rows.append(
            _bounds_row(
                "pure", s, entanglement_renyi2(pure).value,
                steering_measure(pure, Direction.A_TO_B), steering_measure(pure, Direction.B_TO_A),
            )
        )
    return pd.DataFrame(rows, columns=BOUNDS_COLUMNS)


def _plain(value):
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and np.isnan(value):
        return None
    return value


def write_frame(frame: pd.DataFrame, path=None, fmt: str = "csv") -> str | None:
    """Write (or return, when path is None) a scan as CSV or JSON records."""
    if fmt == "json":
        # json writes floats via repr, which keeps every digit of the double
        records = [
            {key: _plain(value) for key, value in row.items()} for row in frame.to_dict(orient="records")
        ]
        text = json.dumps(records, indent=2)
        if path is None:
            return text
        Path(path).write_text(text)
        return None
    return frame.to_csv(path, index=False, na_rep="", float_format=f"%.{config.OUTPUT_DIGITS}g")
