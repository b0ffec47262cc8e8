import hashlib
import json

import pydot
import pytest

from cpmx import canonical_hash, export_dot, load_model, save_model, validate_model
from cpmx.errors import ParseError, UnsupportedVersion

from _build import act, alt, chain, data, model, res
from conftest import FIXTURES


def test_round_trip_is_byte_identical():
    for path in sorted(FIXTURES.glob("*.json")):
        if "params" in path.name:
            continue
        raw = path.read_bytes()
        assert save_model(load_model(raw)) == raw, path.name


def test_insertion_order_does_not_matter():
    acts = [act("A"), *alt("B", "B1", "B2")]
    m1 = model(acts, resources=[res("R", ["f"]), res("Q", ["g"])])
    m2 = model(list(reversed(acts)), flows=list(reversed(chain("A", "B"))), resources=[res("Q", ["g"]), res("R", ["f"])])
    assert save_model(m1) == save_model(m2)


def test_canonical_form():
    text = save_model(model([act("A", req=["z", "a"])])).decode()
    assert text.endswith("\n")
    doc = json.loads(text)
    assert doc["format_version"] == "1"
    assert doc["activities"][0]["req_f"] == ["a", "z"]
    assert text == json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def test_hash_is_sha256_of_bytes():
    m = model([act("A")])
    assert canonical_hash(m) == hashlib.sha256(save_model(m)).hexdigest()


def test_hash_is_id_sensitive():
    assert canonical_hash(model([act("A")])) != canonical_hash(model([act("A2")]))


def test_unknown_version():
    doc = json.loads(save_model(model([act("A")])))
    doc["format_version"] = "2"
    with pytest.raises(UnsupportedVersion):
        load_model(json.dumps(doc))


@pytest.mark.parametrize("bad", [
    b"not json", b"[]", b'{"id": "m"}',
    b'{"id": "m", "max_activities": 3, "extra": 1}',
    b'{"id": "m", "max_activities": 3, "activities": [{"id": "A", "colour": "red"}]}',
    b'{"id": "m", "max_activities": 3, "activities": [{"id": "A"}, {"id": "A"}]}',
    b'{"id": "m", "max_activities": true}',
])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        load_model(bad)


def test_ill_typed_vp_type_still_loads():
    doc = json.loads(save_model(model(alt("B", "B1"))))
    for a in doc["activities"]:
        if a["id"] == "B":
            a["role"] = {"vp": "sometimes"}
    m = load_model(json.dumps(doc))
    assert m.activities["B"].role.vp_type == "sometimes"
    assert validate_model(m).rules() == {"W4"}


def test_dot_export_parses_and_keeps_annotations():
    m = model([act("A", res="R", data=["d"]), *alt("B", "B1", "B2")],
              resources=[res("R", ["f"])], data_objects=[data("d")], vccs=[("B1", "excludes", "B2")])
    text = export_dot(m)
    graphs = pydot.graph_from_dot_data(text)
    assert graphs and len(graphs) == 1
    assert "«VarPoint»" in text and "«Variant»" in text
    edges = graphs[0].get_edges()
    styles = {(e.get_source().strip('"'), e.get_destination().strip('"')): e.get_style() for e in edges}
    assert styles[("B", "B1")] == "dashed"
    assert styles[("B1", "B2")] == "dotted"


def test_empty_file_and_future_version():
    with pytest.raises(ParseError):
        load_model(b"")
    with pytest.raises(UnsupportedVersion):
        load_model(b'{"format_version": "99", "id": "m", "max_activities": 1}')


def test_dot_of_empty_model():
    graph = pydot.graph_from_dot_data(export_dot(model([])))[0]
    flow_edges = [e for e in graph.get_edges() if e.get_style() in (None, "solid")]
    assert {n.get_name().strip('"') for n in graph.get_nodes()} >= {"start", "end"}
    assert len(flow_edges) == 1


def test_dot_of_vpai_case_result(vpai_case_after):
    text = export_dot(vpai_case_after)
    graph = pydot.graph_from_dot_data(text)[0]
    dashed = {(e.get_source().strip('"'), e.get_destination().strip('"'))
              for e in graph.get_edges() if e.get_style() == "dashed"}
    assert {("B", "B1"), ("B", "B2")} <= dashed
    node_b = graph.get_node("B") or graph.get_node('"B"')
    assert "«VarPoint»" in node_b[0].get_label()
