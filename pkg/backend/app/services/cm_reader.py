"""
Reading and writing covariance-matrix files.

JSON: {"n_a": int, "n_b": int, "matrix": row-major list of 2(n+m)^2 reals}
CSV:  first line "n_a,n_b", then one matrix row per line.
Writers emit 17 significant digits.
"""

import json
from io import StringIO
from pathlib import Path

import numpy as np
import pandas as pd

from backend.app import config
from backend.app.exceptions import CMParseError, StructuralError
from backend.app.models import CovarianceMatrix


def _to_cm(matrix, n_a, n_b, source: str) -> CovarianceMatrix:
    try:
        n_a, n_b = int(n_a), int(n_b)
        matrix = np.asarray(matrix, dtype=float)
        dim = 2 * (n_a + n_b)
        if matrix.ndim == 1:
            if matrix.size != dim * dim:
                raise CMParseError(f"{source}: expected {dim * dim} matrix entries, got {matrix.size}")
            matrix = matrix.reshape(dim, dim)
        return CovarianceMatrix.from_array(matrix, n_a, n_b)
    except (StructuralError, TypeError, ValueError) as e:
        if isinstance(e, CMParseError):
            raise
        raise CMParseError(f"{source}: {e}") from e


def parse_cm_json(text: str, source: str = "<json>") -> CovarianceMatrix:
    try:
        payload = json.loads(text)
        return _to_cm(payload["matrix"], payload["n_a"], payload["n_b"], source)
    except (json.JSONDecodeError, KeyError, TypeError) as e:
        raise CMParseError(f"{source}: malformed CM JSON ({e})") from e


def parse_cm_csv(text: str, source: str = "<csv>") -> CovarianceMatrix:
    lines = text.strip().splitlines()
    if len(lines) < 2:
        raise CMParseError(f"{source}: CSV needs a partition line and matrix rows")
    try:
        n_a, n_b = (int(v) for v in lines[0].split(","))
        rows = pd.read_csv(StringIO("\n".join(lines[1:])), header=None).to_numpy(dtype=float)
    except (ValueError, pd.errors.ParserError) as e:
        raise CMParseError(f"{source}: malformed CM CSV ({e})") from e
    return _to_cm(rows, n_a, n_b, source)


def read_cm(path: str | Path) -> CovarianceMatrix:
    """Read a CM file; the format follows the extension (.csv, otherwise JSON)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise CMParseError(f"cannot read {path}: {e}") from e
    if path.suffix.lower() == ".csv":
        return parse_cm_csv(text, str(path))
    return parse_cm_json(text, str(path))


def format_cm_json(sigma: CovarianceMatrix) -> str:
    # json writes floats via repr, which round-trips the full double
    return json.dumps(sigma.to_json_dict())


def format_cm_csv(sigma: CovarianceMatrix) -> str:
    body = pd.DataFrame(sigma.data).to_csv(header=False, index=False, float_format=f"%.{config.OUTPUT_DIGITS}g")
    return f"{sigma.n_modes_a},{sigma.n_modes_b}\n{body}"


def write_cm(sigma: CovarianceMatrix, path: str | Path) -> None:
    path = Path(path)
    text = format_cm_csv(sigma) if path.suffix.lower() == ".csv" else format_cm_json(sigma)
    path.write_text(text)
