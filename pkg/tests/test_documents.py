import json
from fractions import Fraction

import pytest
from hypothesis import given

from symratio.documents import DocumentError, GraphDocument, load_document, parse_document, parse_rational
from symratio.homology import RationalMatrix

from .strategies import C3, C3_MOMENTA, graphs_with_momenta

C3_DOC = {
    "version": 1,
    "vertices": ["a", "b", "c"],
    "edges": [{"id": "x", "tail": "a", "head": "b"}, {"id": "y", "tail": "b", "head": "c"},
              {"id": "z", "tail": "c", "head": "a"}],
    "momenta": {"dim": 1, "form": [["1"]], "p": {"a": ["1"], "b": ["1"], "c": ["-2"]}},
    "y": [["2", "3", "5"]],
    "base": ["1", "1", "1"],
    "perturbation": [["0", "1/2", "0"], ["0", "0", "0"], ["-1/3", "0", "0"]],
}


def test_parse_c3():
    doc = parse_document(C3_DOC)
    assert doc.graph == C3 and doc.momenta == C3_MOMENTA
    assert doc.edge_ids == ("x", "y", "z")
    assert doc.y == ((2, 3, 5),)
    assert doc.perturbation[2, 0] == Fraction(-1, 3)


def test_round_trip_is_idempotent():
    doc = parse_document(C3_DOC)
    again = parse_document(json.loads(doc.dumps()))
    assert again == doc and again.dumps() == doc.dumps()


@given(graphs_with_momenta(max_n=5, loops=True))
def test_round_trip_random(gm):
    g, mom = gm
    doc = GraphDocument.from_graph(g, mom, perturbation=RationalMatrix.identity(g.m))
    assert parse_document(json.loads(doc.dumps())) == doc


def test_missing_momenta_default_to_zero():
    data = dict(C3_DOC, momenta={"p": {"a": ["1"], "b": ["-1"]}})
    assert parse_document(data).momenta.p[2] == (0,)


@pytest.mark.parametrize("patch, message", [
    ({"version": 2}, "version"),
    ({"vertices": ["a", "a", "c"]}, "unique"),
    ({"vertices": []}, "nonempty"),
    ({"edges": [{"tail": "a", "head": "q"}]}, "unknown vertex"),
    ({"edges": [{"tail": "a"}]}, "'tail' and 'head'"),
    ({"momenta": {"p": {"a": ["1"], "b": ["1"], "c": ["1"]}}}, "momentum not conserved"),
    ({"momenta": {"p": {"d": ["1"]}}}, "unknown vertices"),
    ({"momenta": {"dim": 1, "form": [["1", "0"]], "p": {}}}, "form"),
    ({"y": [["1", "2"]]}, "3 edges"),
    ({"y": [["1", "2", "1.5e"]]}, "not a rational"),
    ({"base": ["1", "0", "1"]}, "positive"),
    ({"perturbation": [["0"]]}, "3x3"),
])
def test_errors(patch, message):
    with pytest.raises(DocumentError, match=message):
        parse_document(C3_DOC | patch)


def test_rationals_must_be_strings_or_ints():
    assert parse_rational("-7/2", "x") == Fraction(-7, 2)
    assert parse_rational(3, "x") == 3
    with pytest.raises(DocumentError):
        parse_rational(0.5, "x")
    with pytest.raises(DocumentError):
        parse_rational(True, "x")


def test_load_document_errors(tmp_path):
    with pytest.raises(DocumentError, match="cannot read"):
        load_document(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(DocumentError, match="invalid JSON"):
        load_document(bad)
    good = tmp_path / "c3.json"
    good.write_text(json.dumps(C3_DOC))
    assert load_document(good).graph == C3
