import io
import json

import numpy as np
import pandas as pd
import pytest

from backend.app.exceptions import ConfigError
from backend.app.models import GridAxis, RunConfig
from backend.pipelines.scans import BOUNDS_COLUMNS, REGION_COLUMNS, scan_bounds, scan_regions, write_frame


@pytest.fixture
def region_config():
    return RunConfig.build(eta=0.5, mu_grid=GridAxis(min=0.1, max=1.0, steps=10))


@pytest.fixture
def bounds_config():
    return RunConfig.build(s_grid=GridAxis(min=1.0, max=10.0, steps=10), a=1e8)


def _cell(frame: pd.DataFrame, mu_a: float, mu_b: float) -> pd.Series:
    match = frame[np.isclose(frame.mu_a, mu_a) & np.isclose(frame.mu_b, mu_b)]
    assert len(match) == 1
    return match.iloc[0]


def test_region_scan_layout(region_config):
    frame = scan_regions(region_config)
    assert list(frame.columns) == REGION_COLUMNS
    assert len(frame) == 100
    # row-major with mu_a outer
    assert frame.mu_a.iloc[0] == frame.mu_a.iloc[9]
    assert frame.mu_b.iloc[0] != frame.mu_b.iloc[1]


def test_region_scan_labels(region_config):
    frame = scan_regions(region_config)

    high = _cell(frame, 0.9, 0.9)
    assert high.physicality == "unphysical"
    assert np.isnan(high.g_max)

    low = _cell(frame, 0.3, 0.3)
    assert low.physicality == "physical"
    assert low.separability == "coexistence"

    physical = frame[frame.physicality == "physical"]
    above = physical[physical.mu_b > 0.5 + 1e-9]
    assert above.steer_a_to_b.all()
    below = physical[physical.mu_b < 0.5 - 1e-9]
    assert not below.steer_a_to_b.any()


def test_region_overlay_is_consistent_with_flags(region_config):
    frame = scan_regions(region_config)
    physical = frame[frame.physicality == "physical"]
    assert physical.g_max.notna().all()
    off_boundary = physical[np.abs(physical.mu_b - physical.eta) > 1e-9]
    assert ((off_boundary.g_a_to_b > 0) == off_boundary.steer_a_to_b).all()
    assert (physical.g_max == np.fmax(physical.g_a_to_b, physical.g_b_to_a)).all()


def test_region_scan_is_byte_identical_across_runs(region_config):
    first = write_frame(scan_regions(region_config))
    second = write_frame(scan_regions(region_config.model_copy(update={"workers": 4})))
    assert first == second


@pytest.mark.parametrize(
    "fields",
    [
        {"eta": 0.0},
        {"eta": 1.5},
        {"mu_grid": GridAxis(min=0.0, max=1.0, steps=5)},
        {"mu_grid": GridAxis(min=0.1, max=1.2, steps=5)},
    ],
)
def test_region_scan_rejects_bad_config(fields):
    with pytest.raises(ConfigError):
        scan_regions(RunConfig.build(**fields))


def test_bounds_scan_rows(bounds_config):
    frame = scan_bounds(bounds_config)
    assert list(frame.columns) == BOUNDS_COLUMNS

    extremal = frame[frame.family == "extremal"].set_index("parameter")
    row = extremal.loc[2.0]
    assert row.entanglement == pytest.approx(np.log(5.0), abs=1e-5)
    assert row.g_a_to_b == pytest.approx(np.log(2.0), abs=1e-5)
    assert row.g_b_to_a == pytest.approx(np.log(3.0), abs=1e-5)
    assert row.g_a_to_b == pytest.approx(row.lower_boundary, abs=1e-5)
    assert extremal.loc[1.0].g_a_to_b == pytest.approx(0.0, abs=1e-5)

    pure = frame[frame.family == "pure"].set_index("parameter").loc[1.0]
    assert (pure.entanglement, pure.g_a_to_b, pure.g_b_to_a) == pytest.approx((np.log(3.0),) * 3)

    swapped = frame[frame.family == "extremal_swapped"].set_index("parameter").loc[2.0]
    assert swapped.g_b_to_a == pytest.approx(np.log(2.0), abs=1e-5)


def test_bounds_scan_stays_inside_the_sandwich(bounds_config):
    frame = scan_bounds(bounds_config)
    assert (frame.g_b_to_a <= frame.sandwich_upper + 1e-6).all()
    assert (frame.g_b_to_a >= frame.sandwich_lower - 1e-6).all()
    assert (np.fmax(frame.g_a_to_b, frame.g_b_to_a) <= frame.upper_boundary + 1e-8).all()


def test_bounds_scan_rejects_bad_config():
    with pytest.raises(ConfigError):
        scan_bounds(RunConfig.build(s_grid=GridAxis(min=0.5, max=2.0, steps=3)))
    with pytest.raises(ConfigError):
        scan_bounds(RunConfig.build(s_grid=GridAxis(min=1.0, max=20.0, steps=3), a=10.0))


def test_frame_writers(bounds_config, tmp_path):
    frame = scan_bounds(bounds_config)
    text = write_frame(frame)
    assert pd.read_csv(io.StringIO(text)).shape == frame.shape
    records = json.loads(write_frame(frame, fmt="json"))
    assert records[0]["family"] == "extremal"
    path = tmp_path / "bounds.json"
    write_frame(frame, path, fmt="json")
    assert json.loads(path.read_text()) == records
