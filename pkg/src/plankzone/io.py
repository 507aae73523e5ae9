"""Reading vector, Gram and zone files; JSON-safe conversion of results."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from plankzone.geom_core import GramMatrix, UnitVectorSet, Zone, gram


class InputError(ValueError):
    """Unreadable or malformed input file."""


def _read_text(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _parse_json(text: str, path):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _parse_csv(text: str, path) -> list:
    rows = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        if row[0].lstrip().startswith("#"):
            continue
        vals = []
        for col, cell in enumerate(row, start=1):
            try:
                vals.append(float(cell))
            except ValueError:
                raise InputError(f"{path}: line {lineno}, column {col}: not a number: {cell.strip()!r}") from None
        rows.append(vals)
    if not rows:
        raise InputError(f"{path}: no vectors found")
    if len({len(r) for r in rows}) != 1:
        raise InputError(f"{path}: rows have differing lengths")
    return rows


def _matrix_from(obj, key, path) -> np.ndarray:
    try:
        arr = np.array(obj, dtype=float)
    except (TypeError, ValueError):
        raise InputError(f"{path}: '{key}' must be a list of equal-length numeric lists") from None
    if arr.ndim != 2 or arr.size == 0:
        raise InputError(f"{path}: '{key}' must be a non-empty 2-D array")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{path}: '{key}' contains non-finite numbers")
    return arr


def _looks_like_json(path, text) -> bool:
    return str(path).endswith(".json") or text.lstrip().startswith(("{", "["))


def load_document(path):
    """Return ("vectors" | "gram", array) for a vector or Gram-matrix file."""
    text = _read_text(path)
    if not _looks_like_json(path, text):
        return "vectors", np.array(_parse_csv(text, path))
    doc = _parse_json(text, path)
    if isinstance(doc, dict) and "vectors" in doc:
        return "vectors", _matrix_from(doc["vectors"], "vectors", path)
    if isinstance(doc, dict) and "gram" in doc:
        return "gram", _matrix_from(doc["gram"], "gram", path)
    if isinstance(doc, list):
        return "vectors", _matrix_from(doc, "vectors", path)
    raise InputError(f"{path}: expected an object with a 'vectors' or 'gram' key")


def load_vectors(path, normalize: bool = False) -> UnitVectorSet:
    kind, arr = load_document(path)
    if kind != "vectors":
        raise InputError(f"{path}: expected vectors, found a Gram matrix")
    return UnitVectorSet.normalized(arr) if normalize else UnitVectorSet(arr)


def load_gram(path, normalize: bool = False) -> tuple:
    """Gram matrix from either file kind; returns (GramMatrix, UnitVectorSet or None)."""
    kind, arr = load_document(path)
    if kind == "gram":
        return GramMatrix(arr), None
    vs = UnitVectorSet.normalized(arr) if normalize else UnitVectorSet(arr)
    return gram(vs), vs


def load_vector(path) -> np.ndarray:
    text = _read_text(path)
    if _looks_like_json(path, text):
        doc = _parse_json(text, path)
        if isinstance(doc, dict):
            doc = doc.get("vector")
        arr = np.array(doc, dtype=float) if doc is not None else None
        if arr is None or arr.ndim != 1:
            raise InputError(f"{path}: expected a list of numbers or {{\"vector\": [...]}}")
        return arr
    rows = _parse_csv(text, path)
    return np.array(rows[0] if len(rows) == 1 else [r[0] for r in rows])


def load_zones(path) -> list:
    doc = _parse_json(_read_text(path), path)
    if not isinstance(doc, dict) or not isinstance(doc.get("zones"), list):
        raise InputError(f"{path}: expected an object with a 'zones' list")
    zones = []
    for i, z in enumerate(doc["zones"]):
        try:
            zones.append(Zone(np.array(z["normal"], dtype=float), float(z["width"])))
        except (KeyError, TypeError) as exc:
            raise InputError(f"{path}: zone {i} needs 'normal' and 'width' ({exc})") from None
        except ValueError as exc:
            raise InputError(f"{path}: zone {i}: {exc}") from None
    return zones


def dump_vectors(vs: UnitVectorSet) -> str:
    return json.dumps({"vectors": vs.vectors.tolist()}, indent=2) + "\n"


def jsonable(obj):
    """Recursively convert numpy values for json.dumps (floats keep full repr precision)."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    return obj
