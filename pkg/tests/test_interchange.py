import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from smallcircle.interchange import (
    SCHEMA_VERSION,
    DocumentError,
    doc_to_matrix,
    dumps,
    load_document,
    matrix_to_doc,
)

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(arrays(np.complex128, st.tuples(st.integers(1, 4), st.integers(1, 4)),
              elements=st.complex_numbers(allow_nan=False, allow_infinity=False)))
def test_round_trip_is_bit_identical(m):
    text = dumps(matrix_to_doc(m, note="x"))
    back = doc_to_matrix(json.loads(text))
    assert back.shape == m.shape
    assert np.array_equal(back.view(np.float64), m.view(np.float64))


def test_document_layout():
    doc = matrix_to_doc(np.array([[1 + 2j, 3]]), k=1)
    assert doc == {"schema_version": SCHEMA_VERSION, "rows": 1, "cols": 2,
                   "entries": [[1.0, 2.0], [3.0, 0.0]], "metadata": {"k": 1}}
    assert "metadata" not in matrix_to_doc(np.eye(1))


@pytest.mark.parametrize("doc", [
    [],
    {"schema_version": "2", "rows": 1, "cols": 1, "entries": [[0, 0]]},
    {"schema_version": "1", "rows": 0, "cols": 1, "entries": []},
    {"schema_version": "1", "rows": 1, "cols": 1, "entries": [[0, 0], [0, 0]]},
    {"schema_version": "1", "rows": 1, "cols": 1, "entries": [[0]]},
    {"schema_version": "1", "rows": 1, "cols": 1, "entries": [["0", 0]]},
    {"schema_version": "1", "rows": 1, "cols": 1, "entries": [[True, 0]]},
    {"schema_version": "1", "rows": 1, "cols": 1, "entries": [[float("inf"), 0]]},
])
def test_malformed_documents(doc):
    with pytest.raises(DocumentError):
        doc_to_matrix(doc)


def test_matrix_to_doc_requires_2d():
    with pytest.raises(DocumentError):
        matrix_to_doc(np.ones(3))


def test_dumps_refuses_nan():
    with pytest.raises(ValueError):
        dumps({"x": float("nan")})


def test_load_document_errors(tmp_path):
    with pytest.raises(DocumentError):
        load_document(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(DocumentError):
        load_document(bad)
