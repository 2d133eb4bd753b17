import pytest

from core.fixtures import merging, two_chain
from core.loader import (
    LoaderError, load_certificate, load_diagram, load_json, parse_q_sequence, parse_relation_sequence,
    save_json
)
from core.paths import path_id, y_paths


@pytest.fixture
def merging_file(tmp_path):
    diagram, sub = merging(4)
    filepath = tmp_path / "merging.json"
    save_json({"name": "merging", "diagram": diagram.to_dict(), "subdiagram": sub.to_dict(),
               "S": "diagonal", "Q": "tail"}, str(filepath))
    return str(filepath)


def test_fixture_reference():
    diagram, sub, metadata = load_diagram("fixture:two_vertex", depth=3)
    assert diagram.depth == 3
    assert metadata["depth"] == 3
    assert metadata["S"] is None and metadata["Q"] is None
    assert len(y_paths(diagram, sub, 3)) == 1


def test_unknown_fixture():
    with pytest.raises(LoaderError):
        load_diagram("fixture:nope")


def test_json_file_keeps_relations(merging_file):
    diagram, sub, metadata = load_diagram(merging_file)
    expected, expected_sub = merging(4)
    assert diagram.depth == 4
    assert sub == expected_sub
    assert metadata["name"] == "merging"
    assert metadata["source"] == "merging.json"
    assert (metadata["S"], metadata["Q"]) == ("diagonal", "tail")


def test_json_file_truncation(merging_file):
    diagram, _, _ = load_diagram(merging_file, depth=2)
    assert diagram.depth == 2
    with pytest.raises(LoaderError):
        load_diagram(merging_file, depth=9)


def test_missing_and_broken_files(tmp_path):
    with pytest.raises(LoaderError, match="File not found"):
        load_json(str(tmp_path / "absent.json"))
    broken = tmp_path / "broken.json"
    broken.write_text('{"diagram": \n  [1, }')
    with pytest.raises(LoaderError, match="line 2"):
        load_diagram(str(broken))
    no_diagram = tmp_path / "empty.json"
    no_diagram.write_text("{}")
    with pytest.raises(LoaderError, match="'diagram'"):
        load_diagram(str(no_diagram))


def test_named_relation_sequences():
    diagram, sub = two_chain(4)
    ys = y_paths(diagram, sub, 4)
    diagonal = parse_relation_sequence("diagonal", diagram, sub)
    assert len(diagonal) == 4
    assert all(relation.class_count == len(ys) for relation in diagonal)
    assert parse_relation_sequence("full", diagram, sub)[0].class_count == 1
    assert len(parse_relation_sequence("tail", diagram, sub)) == 4


def test_explicit_relation_classes():
    diagram, sub = two_chain(4)
    ids = [path_id(y) for y in y_paths(diagram, sub, 4)]
    sequence = parse_relation_sequence([[], [ids]], diagram, sub)
    assert [relation.class_count for relation in sequence] == [2, 1]
    with pytest.raises(LoaderError):
        parse_relation_sequence([[["no/such/path"]]], diagram, sub)
    with pytest.raises(LoaderError, match="Unknown relation"):
        parse_relation_sequence("sideways", diagram, sub)


def test_q_sequences():
    diagram, sub = two_chain(4)
    ids = [path_id(y) for y in y_paths(diagram, sub, 4)]
    assert parse_q_sequence("full", diagram, sub).at(1).class_count == 1
    assert parse_q_sequence("tail", diagram, sub).length == 3
    assert parse_q_sequence([[ids]], diagram, sub).length == 1
    with pytest.raises(LoaderError):
        parse_q_sequence([[ids], []], diagram, sub)
    with pytest.raises(LoaderError):
        parse_q_sequence("sideways", diagram, sub)


def test_certificate_needs_a_format(tmp_path):
    filepath = tmp_path / "certificate.json"
    save_json({"depth": 3}, str(filepath))
    with pytest.raises(LoaderError):
        load_certificate(str(filepath))
    save_json({"format": "bratteli-split/1"}, str(filepath))
    assert load_certificate(str(filepath))["format"] == "bratteli-split/1"


FLAT_DOCUMENT = {
    "levels": [["v0"], ["u", "w"], ["u", "w"]],
    "edges": [
        [{"id": "e1", "s": "v0", "r": "u"}, {"id": "e2", "s": "v0", "r": "w"}],
        [{"id": "e3", "s": "u", "r": "u"}, {"id": "e4", "s": "u", "r": "w"},
         {"id": "e5", "s": "w", "r": "u"}, {"id": "e6", "s": "w", "r": "w"}],
    ],
    "subdiagram": {"W": [["v0"], ["u"], ["u"]], "F": ["e1", "e3"]},
}


def test_flat_document_without_wrapper(tmp_path):
    filepath = tmp_path / "flat.json"
    save_json(FLAT_DOCUMENT, str(filepath))
    diagram, sub, metadata = load_diagram(str(filepath))
    assert diagram.depth == 2
    assert diagram.edge("e4").range == "w"
    assert sub.edges == frozenset({"e1", "e3"})
    assert [path_id(y) for y in y_paths(diagram, sub, 2)] == ["e1/e3"]
    assert metadata["edge_count"] == 6
    assert metadata["S"] is None
