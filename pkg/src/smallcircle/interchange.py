"""JSON documents exchanged by the command line tool.

A matrix document looks like::

    {"schema_version": "1", "rows": 2, "cols": 2,
     "entries": [[re, im], ...],          # row-major
     "metadata": {...}}                   # optional

Floats are written with Python's shortest round-trip representation, so a
document read back yields bit-identical doubles.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .errors import SmallCircleError

SCHEMA_VERSION = "1"
CONVENTION = "U = expm(-Omega); eigenvalues of U are exp(-1j*omega), omega in (-pi, pi]"


class DocumentError(SmallCircleError):
    """Malformed matrix document."""


def matrix_to_doc(m, **metadata) -> dict[str, Any]:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise DocumentError(f"expected a 2-D matrix, got shape {m.shape}")
    doc: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in m.ravel()],
    }
    if metadata:
        doc["metadata"] = metadata
    return doc


def doc_to_matrix(doc: Any) -> np.ndarray:
    if not isinstance(doc, dict):
        raise DocumentError("matrix document must be a JSON object")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise DocumentError(f"unsupported schema_version {doc.get('schema_version')!r}")
    rows, cols = doc.get("rows"), doc.get("cols")
    if not (isinstance(rows, int) and isinstance(cols, int) and rows > 0 and cols > 0):
        raise DocumentError("rows and cols must be positive integers")
    entries = doc.get("entries")
    if not isinstance(entries, list) or len(entries) != rows * cols:
        raise DocumentError(f"entries must be a list of {rows * cols} [re, im] pairs")
    values = []
    for e in entries:
        if (not isinstance(e, list) or len(e) != 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in e)):
            raise DocumentError(f"bad entry {e!r}; expected [re, im]")
        if not all(math.isfinite(v) for v in e):
            raise DocumentError("entries must be finite")
        values.append(complex(e[0], e[1]))
    return np.array(values, dtype=complex).reshape(rows, cols)


def load_document(path: str | Path) -> dict[str, Any]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path} is not valid JSON: {exc}") from exc


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"
