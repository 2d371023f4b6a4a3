import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from backend.app.exceptions import CMParseError
from backend.app.services.cm_reader import (
    format_cm_csv,
    format_cm_json,
    parse_cm_csv,
    parse_cm_json,
    read_cm,
    write_cm,
)
from backend.app.services.random_states import random_cm


def test_parse_json(tmsv2):
    text = json.dumps({"n_a": 1, "n_b": 1, "matrix": tmsv2.data.ravel().tolist()})
    assert_allclose(parse_cm_json(text).data, tmsv2.data)


def test_parse_csv():
    text = "1,1\n2,0,1.5,0\n0,2,0,-1.5\n1.5,0,2,0\n0,-1.5,0,2\n"
    sigma = parse_cm_csv(text)
    assert sigma.data[1, 3] == -1.5
    assert (sigma.n_modes_a, sigma.n_modes_b) == (1, 1)


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        '{"n_a": 1, "matrix": [1, 0, 0, 1]}',
        '{"n_a": 1, "n_b": 1, "matrix": [1, 0, 0, 1]}',
        '{"n_a": 1, "n_b": 0, "matrix": [1, 0, 0, 1]}',
    ],
)
def test_malformed_json_raises_parse_error(text):
    with pytest.raises(CMParseError):
        parse_cm_json(text)


def test_asymmetric_csv_raises_parse_error():
    with pytest.raises(CMParseError):
        parse_cm_csv("1,0\n1,5\n0,1\n")
    with pytest.raises(CMParseError):
        parse_cm_csv("1,1\n1,0,0,0\n0,1,0,0\n0.5,0,1,0\n0,0,0,1\n")


def test_written_files_read_back_exactly(tmp_path):
    sigma = random_cm(2, 1, seed=17)
    for name in ("state.json", "state.csv"):
        path = tmp_path / name
        write_cm(sigma, path)
        assert np.array_equal(read_cm(path).data, sigma.data)


def test_csv_uses_seventeen_digits():
    sigma = random_cm(1, 1, seed=1)
    first_row = format_cm_csv(sigma).splitlines()[1].split(",")
    assert float(first_row[0]) == sigma.data[0, 0]


def test_json_has_expected_keys(tmsv2):
    payload = json.loads(format_cm_json(tmsv2))
    assert set(payload) == {"n_a", "n_b", "matrix"}
    assert len(payload["matrix"]) == 16


def test_missing_file_raises_parse_error(tmp_path):
    with pytest.raises(CMParseError):
        read_cm(tmp_path / "missing.json")
