"""JSON interchange for matrices and composite documents.

A matrix is ``{"dim": d, "entries": [[re, im], ...]}`` with ``d * d``
pairs in row-major order.  Floats are written with ``repr`` precision,
which round-trips every double exactly.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ParseError


def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return {
        "dim": int(m.shape[0]),
        "entries": [[float(z.real), float(z.imag)] for z in m.ravel()],
    }


def matrix_from_json(doc, where: str = "matrix") -> np.ndarray:
    if not isinstance(doc, dict) or "dim" not in doc or "entries" not in doc:
        raise ParseError(f"{where}: expected an object with 'dim' and 'entries'")
    dim = doc["dim"]
    entries = doc["entries"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ParseError(f"{where}: 'dim' must be a positive integer")
    if not isinstance(entries, list) or len(entries) != dim * dim:
        raise ParseError(f"{where}: expected {dim * dim} entries")
    try:
        arr = np.array(entries, dtype=float)
    except (TypeError, ValueError):
        raise ParseError(f"{where}: entries must be [re, im] number pairs") from None
    if arr.shape != (dim * dim, 2):
        raise ParseError(f"{where}: entries must be [re, im] number pairs")
    return (arr[:, 0] + 1j * arr[:, 1]).reshape(dim, dim)


def loads(text: str, source: str = "<string>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def load_document(path) -> object:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None
    return loads(text, str(path))


def load_matrix(path) -> np.ndarray:
    return matrix_from_json(load_document(path), str(path))


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=False, allow_nan=False) + "\n"


def save_matrix(path, m) -> None:
    Path(path).write_text(dumps(matrix_to_json(m)))
