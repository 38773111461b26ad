"""Configuration documents: schema, round trips, validation errors."""

import json

import pytest

from hc3.admissibility import Configuration
from hc3.catalog import build_layered
from hc3.documents import (
    DocumentError,
    InadmissibleDocumentError,
    from_document,
    load,
    save,
    to_document,
)
from hc3.lattice import Window, quotient

DIAG2 = ((2, 0, 0), (0, 2, 0), (0, 0, 2))


def a3_diag2():
    return Configuration(
        quotient(DIAG2), 2, frozenset({(0, 0, 0), (1, 1, 0), (1, 0, 1), (0, 1, 1)})
    )


def test_save_load_round_trip(tmp_path):
    path = tmp_path / "a3.json"
    save(a3_diag2(), path, {"name": "fcc-on-2-torus"})
    doc = json.loads(path.read_text())
    assert doc["d2"] == 2
    assert len(doc["sites"]) == 4
    assert doc["metadata"] == {"name": "fcc-on-2-torus"}
    loaded = load(path)
    assert loaded.occupied == a3_diag2().occupied
    assert loaded.d2 == 2
    # canonical save is a fixpoint
    save(loaded, tmp_path / "again.json", {"name": "fcc-on-2-torus"})
    assert (tmp_path / "again.json").read_text() == path.read_text()


def test_round_trip_layered(tmp_path):
    dhcp = build_layered(5, "ST")
    path = tmp_path / "hcp.json"
    save(dhcp, path)
    loaded = load(path)
    assert loaded.occupied == dhcp.occupied
    assert loaded.domain == dhcp.domain


def test_window_document_round_trip(tmp_path):
    w = Window((-2, -2, -2), (2, 2, 2))
    c = Configuration(w, 4, frozenset({(0, 0, 0), (2, 0, 0), (0, 2, 0)}))
    path = tmp_path / "win.json"
    save(c, path)
    loaded = load(path)
    assert loaded.domain == w
    assert loaded.occupied == c.occupied


def test_sites_are_deduplicated_and_reduced():
    doc = {
        "d2": 2,
        "period": [[2, 0, 0], [0, 2, 0], [0, 0, 2]],
        "sites": [[0, 0, 0], [2, 0, 0], [4, 2, 0]],
    }
    c = from_document(doc)
    assert c.occupied == {(0, 0, 0)}


def test_load_rejects_violating_pair(tmp_path):
    doc = {
        "d2": 2,
        "period": [[4, 0, 0], [0, 4, 0], [0, 0, 4]],
        "sites": [[0, 0, 0], [1, 0, 0]],
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(InadmissibleDocumentError) as err:
        load(path)
    assert err.value.pair == ((0, 0, 0), (1, 0, 0))
    assert err.value.sq_distance == 1
    # --no-validate semantics
    c = load(path, validate=False)
    assert not c.is_admissible()[0]


def test_load_rejects_short_period(tmp_path):
    doc = {"d2": 9, "period": [[2, 0, 0], [0, 2, 0], [0, 0, 2]], "sites": []}
    path = tmp_path / "short.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(InadmissibleDocumentError):
        load(path)


@pytest.mark.parametrize(
    "doc",
    [
        [],
        {"period": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "sites": []},
        {"d2": 0, "period": [[2, 0, 0], [0, 2, 0], [0, 0, 2]], "sites": []},
        {"d2": 2, "sites": []},
        {"d2": 2, "period": [[2, 0, 0], [0, 2, 0]], "sites": []},
        {"d2": 2, "period": [[2, 0], [0, 2, 0], [0, 0, 2]], "sites": []},
        {"d2": 2, "period": [[2, 0, 0], [0, 2, 0], [0, 0, 2]], "sites": [[1, "a", 0]]},
        {"d2": 2, "period": [[2, 0, 0], [0, 2, 0], [0, 0, 2]], "sites": [[0, 0]]},
        {"d2": 2, "period": [[1, 1, 0], [2, 2, 0], [0, 0, 1]], "sites": []},
        {
            "d2": 2,
            "period": [[2, 0, 0], [0, 2, 0], [0, 0, 2]],
            "window": {"lo": [0, 0, 0], "hi": [1, 1, 1]},
            "sites": [],
        },
        {"d2": 2, "window": {"lo": [0, 0, 0]}, "sites": []},
        {"d2": 2, "period": [[2, 0, 0], [0, 2, 0], [0, 0, 2]], "sites": [], "metadata": {"a": 1}},
    ],
)
def test_malformed_documents_rejected(doc):
    with pytest.raises(DocumentError):
        from_document(doc)


def test_invalid_json_is_document_error(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(DocumentError):
        load(path)


def test_to_document_sorts_sites():
    doc = to_document(a3_diag2())
    assert doc["sites"] == sorted(doc["sites"])
