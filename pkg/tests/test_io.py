import json
import math

import numpy as np
import pytest

from povm_uncertainty import catalog
from povm_uncertainty.io import DocumentError, document_to_povm, dumps, loads_document, povm_to_document


def test_round_trip():
    item = catalog.mzx(0.7)
    doc = json.loads(dumps(povm_to_document(item.povm, item.values, item.meta())))
    povm, values = document_to_povm(doc)
    np.testing.assert_array_equal(povm.elements, item.povm.elements)
    assert povm.labels == item.povm.labels
    assert set(values) == {"Z", "X"}
    assert doc["catalog"] == {"name": "mzx", "parameters": {"theta": 0.7}}


@pytest.mark.parametrize("text", [
    "{bad",
    "[]",
    '{"dim": 2}',
    '{"dim": 2, "elements": [[[1, 0]]]}',
    '{"dim": 1, "elements": [[[[1, 0]]]], "values": {"a": [1, 2]}}',
    '{"dim": 1, "elements": [[[[1, 0]]]], "labels": ["a", "b"]}',
    '{"dim": "2", "elements": [[[[1, 0]]]]}',
])
def test_malformed_documents(text):
    with pytest.raises(DocumentError):
        loads_document(text)


def test_dumps_is_deterministic():
    obj = {"b": np.float64(0.1), "a": np.array([1 + 2j, -0.0]), "c": math.nan}
    text = dumps(obj)
    assert text == dumps(obj)
    assert json.loads(text) == {"a": [[1.0, 2.0], [0.0, 0.0]], "b": 0.1, "c": None}
    assert text.endswith("\n")
