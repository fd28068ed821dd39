"""JSON file formats and command-line value parsing.

Formats::

    polynomial  {"dim": d, "terms": [{"exp": [ints], "coef": number}, ...]}
    system      {"dim": d, "poly": <polynomial>, "direction": [numbers],
                 "tol": {"root": r, "rank": k, "cone": c}}        (tol optional)
    frame       {"elements": [[numbers], ...], "kind": "scaled" | "jordan"}
    tuple       {"elements": [[numbers], ...]}
    matrix      {"rows": [[numbers], ...]}

All loaders raise :class:`InputError` naming the file and the offending field.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import HyperError, InputError
from .frames import FrameSet
from .poly import Polynomial
from .system import SystemDef, Tolerances

DEFAULT_TOL = Tolerances()


def parse_point(text: str, dim: int | None = None) -> np.ndarray:
    """Parse ``"1,0,-2.5"`` into a vector."""
    parts = [s.strip() for s in str(text).split(",")]
    try:
        vals = [float(s) for s in parts]
    except ValueError:
        raise InputError(f"cannot parse point {text!r}: expected comma-separated decimals") from None
    if not all(math.isfinite(v) for v in vals):
        raise InputError(f"point {text!r} has non-finite entries")
    if dim is not None and len(vals) != dim:
        raise InputError(f"point {text!r} has {len(vals)} entries, expected {dim}")
    return np.array(vals)


def read_json(path) -> object:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"{path}: cannot read file ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _numbers(value, where: str, length: int | None = None) -> np.ndarray:
    if not isinstance(value, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        raise InputError(f"{where}: expected an array of numbers")
    arr = np.array(value, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{where}: entries must be finite")
    if length is not None and len(arr) != length:
        raise InputError(f"{where}: expected {length} entries, got {len(arr)}")
    return arr


def _rows(value, where: str, width: int | None = None) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise InputError(f"{where}: expected a non-empty array of arrays")
    rows = [_numbers(r, f"{where}[{i}]", width) for i, r in enumerate(value)]
    w = len(rows[0])
    for i, r in enumerate(rows):
        if len(r) != w:
            raise InputError(f"{where}[{i}]: expected {w} entries, got {len(r)}")
    return np.array(rows)


def _object(data, where: str) -> dict:
    if not isinstance(data, dict):
        raise InputError(f"{where}: expected a JSON object")
    return data


def polynomial_from_json(data, where: str = "poly") -> Polynomial:
    _object(data, where)
    try:
        return Polynomial.from_dict(data)
    except HyperError as exc:
        raise InputError(f"{where}: {exc}") from None


def tolerances_from_json(data, where: str = "tol") -> Tolerances:
    if data is None:
        return DEFAULT_TOL
    _object(data, where)
    vals = {}
    for key in ("root", "rank", "cone"):
        if key in data:
            v = data[key]
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not v > 0:
                raise InputError(f"{where}.{key}: expected a positive number")
            vals[key] = float(v)
    unknown = set(data) - {"root", "rank", "cone"}
    if unknown:
        raise InputError(f"{where}: unknown fields {sorted(unknown)}")
    return DEFAULT_TOL.replace(**vals)


def system_from_json(data, where: str = "system", tol_override: dict | None = None, name: str = "") -> SystemDef:
    data = _object(data, where)
    for key in ("dim", "poly", "direction"):
        if key not in data:
            raise InputError(f"{where}: missing field {key!r}")
    dim = data["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise InputError(f"{where}.dim: expected a positive integer")
    poly = polynomial_from_json(data["poly"], f"{where}.poly")
    if poly.dim != dim:
        raise InputError(f"{where}.poly.dim is {poly.dim} but {where}.dim is {dim}")
    e = _numbers(data["direction"], f"{where}.direction", dim)
    tol = tolerances_from_json(data.get("tol"), f"{where}.tol")
    if tol_override:
        tol = tol.replace(**tol_override)
    try:
        return SystemDef(poly, e, tol, None, name)
    except HyperError as exc:
        raise InputError(f"{where}: {exc}") from None


def system_to_json(sys: SystemDef) -> dict:
    return sys.to_dict()


def frame_from_json(data, where: str = "frame", dim: int | None = None) -> FrameSet:
    data = _object(data, where)
    if "elements" not in data:
        raise InputError(f"{where}: missing field 'elements'")
    C = _rows(data["elements"], f"{where}.elements", dim)
    kind = data.get("kind", "scaled")
    if kind not in ("scaled", "jordan"):
        raise InputError(f"{where}.kind: expected 'scaled' or 'jordan', got {kind!r}")
    return FrameSet(C, kind)


def tuple_from_json(data, where: str = "tuple", dim: int | None = None, length: int | None = None) -> np.ndarray:
    data = _object(data, where)
    if "elements" not in data:
        raise InputError(f"{where}: missing field 'elements'")
    A = _rows(data["elements"], f"{where}.elements", dim)
    if length is not None and len(A) != length:
        raise InputError(f"{where}.elements: expected {length} elements, got {len(A)}")
    return A


def matrix_from_json(data, where: str = "matrix", shape: tuple | None = None) -> np.ndarray:
    data = _object(data, where)
    if "rows" not in data:
        raise InputError(f"{where}: missing field 'rows'")
    M = _rows(data["rows"], f"{where}.rows")
    if shape is not None and M.shape != tuple(shape):
        raise InputError(f"{where}.rows: expected shape {tuple(shape)}, got {M.shape}")
    return M


def load(path, kind: str, **kw):
    """Read a file and parse it as ``kind`` (system, frame, tuple, matrix, polynomial)."""
    data = read_json(path)
    parser = {
        "system": system_from_json,
        "frame": frame_from_json,
        "tuple": tuple_from_json,
        "matrix": matrix_from_json,
        "polynomial": polynomial_from_json,
    }[kind]
    return parser(data, str(path), **kw)
