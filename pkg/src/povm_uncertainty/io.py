"""JSON document format for POVMs and helpers for report serialization.

A POVM document looks like::

    {"dim": 2, "labels": ["+", "-"],
     "elements": [[[[1, 0], [0, 0]], [[0, 0], [0, 0]]], ...],
     "values": {"Z": [1, -1]}}

Matrices are row-major nested lists of ``[re, im]`` pairs.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import DomainError
from .povm import Povm

SCHEMA_VERSION = "1"


class DocumentError(ValueError):
    """The input is not a well-formed POVM document."""


def matrix_to_json(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def vector_to_json(v) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex).reshape(-1)]


def _complex_array(obj, what: str) -> np.ndarray:
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DocumentError(f"{what}: entries must be [re, im] number pairs") from exc
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise DocumentError(f"{what}: entries must be [re, im] pairs")
    if not np.all(np.isfinite(arr)):
        raise DocumentError(f"{what}: non-finite entry")
    return arr[..., 0] + 1j * arr[..., 1]


def parse_matrix(obj, what: str = "matrix") -> np.ndarray:
    m = _complex_array(obj, what)
    if m.ndim != 2:
        raise DocumentError(f"{what}: expected a matrix of [re, im] pairs")
    return m


def parse_vector(obj, what: str = "vector") -> np.ndarray:
    v = _complex_array(obj, what)
    if v.ndim != 1:
        raise DocumentError(f"{what}: expected a list of [re, im] pairs")
    return v


def povm_to_document(povm: Povm, values: dict | None = None, meta: dict | None = None) -> dict:
    doc = {
        "dim": povm.dim,
        "labels": list(povm.labels),
        "elements": [matrix_to_json(m) for m in povm.elements],
        "values": {k: [float(x) for x in v] for k, v in (values or {}).items()},
    }
    if meta:
        doc.update(meta)
    return doc


def document_to_povm(doc) -> tuple[Povm, dict[str, np.ndarray]]:
    if not isinstance(doc, dict):
        raise DocumentError("document must be a JSON object")
    for key in ("dim", "elements"):
        if key not in doc:
            raise DocumentError(f"missing key {key!r}")
    dim = doc["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise DocumentError("'dim' must be a positive integer")
    elements = doc["elements"]
    if not isinstance(elements, list) or not elements:
        raise DocumentError("'elements' must be a non-empty list")
    mats = [parse_matrix(e, f"elements[{k}]") for k, e in enumerate(elements)]
    for k, m in enumerate(mats):
        if m.shape != (dim, dim):
            raise DocumentError(f"elements[{k}] has shape {m.shape}, expected ({dim}, {dim})")
    labels = doc.get("labels") or [str(k) for k in range(len(mats))]
    if not isinstance(labels, list) or len(labels) != len(mats):
        raise DocumentError("'labels' must list one label per element")
    values = {}
    raw_values = doc.get("values", {})
    if not isinstance(raw_values, dict):
        raise DocumentError("'values' must map names to value lists")
    for name, vals in raw_values.items():
        if not isinstance(vals, list) or len(vals) != len(mats):
            raise DocumentError(f"value map {name!r} must have one value per element")
        try:
            arr = np.asarray(vals, dtype=float)
        except (TypeError, ValueError) as exc:
            raise DocumentError(f"value map {name!r} must be numeric") from exc
        if not np.all(np.isfinite(arr)):
            raise DocumentError(f"value map {name!r} has non-finite values")
        values[str(name)] = arr
    try:
        povm = Povm(np.array(mats), [str(s) for s in labels])
    except (DomainError, ValueError) as exc:
        raise DocumentError(str(exc)) from exc
    return povm, values


def loads_document(text: str) -> tuple[Povm, dict[str, np.ndarray], dict]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc}") from exc
    povm, values = document_to_povm(doc)
    return povm, values, doc


def to_jsonable(obj):
    """Recursively convert numpy values and complex numbers to JSON-friendly types."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            if obj.ndim == 2:
                return matrix_to_json(obj)
            if obj.ndim == 1:
                return vector_to_json(obj)
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return None
        return 0.0 if x == 0.0 else x
    return obj


def dumps(obj) -> str:
    """Deterministic JSON text: sorted keys, shortest round-trip float repr."""
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"
