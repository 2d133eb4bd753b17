import json

import pytest

from core.fixtures import full_subdiagram, two_vertex
from main import EXIT_EXHAUSTED, EXIT_FAIL, EXIT_INPUT, EXIT_PASS, main


def _read(path):
    return json.loads(path.read_text())


@pytest.fixture(scope="module")
def split_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("split")
    code = main(["split", "fixture:two_vertex", "--out", str(out)])
    return code, out


@pytest.fixture(scope="module")
def absorb_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("absorb")
    code = main(["absorb", "fixture:two_chain", "--depth", "4", "--relation", "full", "--out", str(out)])
    return code, out


def test_validate_writes_diagnostics(tmp_path):
    assert main(["validate", "fixture:two_vertex", "--depth", "3", "--out", str(tmp_path)]) == EXIT_PASS
    record = _read(tmp_path / "validation.json")
    assert record["validation"]["status"] == "pass"
    assert record["counting_violations"] == [[1, "u", 1, 0]]
    assert "simplicity" in record


def test_split_writes_certificate_and_report(split_run):
    code, out = split_run
    assert code == EXIT_PASS
    certificate = _read(out / "split_certificate.json")
    assert certificate["format"] == "bratteli-split/1"
    report = _read(out / "report.json")
    assert report["status"] == "pass"
    assert [r["title"] for r in report["reports"]] == [
        "lemma clauses", "splitting conclusions", "minimality", "measures",
    ]


def test_split_pdf_outputs(tmp_path):
    code = main(["split", "fixture:merging", "--relation", "diagonal", "--resolution", "0", "--pdf",
                 "--out", str(tmp_path)])
    assert code == EXIT_PASS
    for name in ("report.json", "report.md", "report.pdf", "class_sizes.png"):
        assert (tmp_path / name).exists(), name
    assert "# Bratteli Splitting Verification Report" in (tmp_path / "report.md").read_text()


def test_verify_split_certificate(split_run, tmp_path):
    _, out = split_run
    code = main(["verify", str(out / "split_certificate.json"), "--out", str(tmp_path)])
    assert code == EXIT_PASS
    assert _read(tmp_path / "report.json")["mutation"] is None


def test_verify_with_mutations_records_the_sweep(split_run, tmp_path):
    _, out = split_run
    code = main(["verify", str(out / "split_certificate.json"), "--mutations", "6", "--out", str(tmp_path)])
    sweep = _read(tmp_path / "report.json")["mutation"]
    assert sweep["total"] <= 6
    assert code == (EXIT_FAIL if sweep["escaped"] else EXIT_PASS)


def test_absorb_writes_certificate(absorb_run):
    code, out = absorb_run
    assert code == EXIT_PASS
    certificate = _read(out / "absorption_certificate.json")
    assert certificate["format"] == "bratteli-absorption/1"
    assert certificate["copies"] == 2
    assert set(certificate["transport"].values()) == {"pass"}


def test_verify_absorption_certificate(absorb_run, tmp_path):
    _, out = absorb_run
    main(["verify", str(out / "absorption_certificate.json"), "--resolution", "0", "--out", str(tmp_path)])
    report = _read(tmp_path / "report.json")
    assert report["format"] == "bratteli-absorption/1"
    assert report["reports"][0]["title"] == "absorption"
    assert report["reports"][0]["status"] == "pass"


def test_absorb_on_a_disconnected_diagram_exhausts(tmp_path):
    assert main(["absorb", "fixture:disconnected", "--depth", "4", "--out", str(tmp_path)]) == EXIT_EXHAUSTED


def test_input_errors(tmp_path):
    assert main(["split", str(tmp_path / "absent.json"), "--out", str(tmp_path)]) == EXIT_INPUT
    assert main(["absorb", "fixture:two_chain", "--copies", "-1", "--out", str(tmp_path)]) == EXIT_INPUT
    assert main(["validate", "fixture:unknown", "--out", str(tmp_path)]) == EXIT_INPUT


def test_telescope_along_a_plan(tmp_path):
    code = main(["telescope", "fixture:two_vertex", "--depth", "3", "--plan", "0,2,3", "--out", str(tmp_path)])
    assert code == EXIT_PASS
    record = _read(tmp_path / "telescoped.json")
    assert record["plan"] == [0, 2, 3]
    assert record["subdiagram"]["F"] == ["a1.uu2", "uu3"]


def test_measures(tmp_path):
    assert main(["measures", "fixture:odometer", "--depth", "4", "--out", str(tmp_path)]) == EXIT_PASS
    record = _read(tmp_path / "measures.json")
    assert record["dimension"] == 0
    assert record["y_cylinder_measures"]["2"] == ["1/4"]


def test_render_fixture_and_certificate(absorb_run, tmp_path):
    assert main(["render", "fixture:odometer", "--depth", "3", "--out", str(tmp_path)]) == EXIT_PASS
    assert "rank = same" in (tmp_path / "diagram.dot").read_text()

    _, out = absorb_run
    certificate = str(out / "absorption_certificate.json")
    assert main(["render", certificate, "--out", str(tmp_path)]) == EXIT_PASS
    dot = (tmp_path / "diagram.dot").read_text()
    assert "color = red" in dot
    assert "color = blue" in dot


def _write(path, record):
    path.write_text(json.dumps(record))
    return str(path)


FLAT_DOCUMENT = {
    "levels": [["v0"], ["u", "w"], ["u", "w"]],
    "edges": [
        [{"id": "e1", "s": "v0", "r": "u"}, {"id": "e2", "s": "v0", "r": "w"}],
        [{"id": "e3", "s": "u", "r": "u"}, {"id": "e4", "s": "u", "r": "w"},
         {"id": "e5", "s": "w", "r": "u"}, {"id": "e6", "s": "w", "r": "w"}],
    ],
    "subdiagram": {"W": [["v0"], ["u"], ["u"]], "F": ["e1", "e3"]},
}


def test_validate_reads_flat_documents(tmp_path):
    source = _write(tmp_path / "flat.json", FLAT_DOCUMENT)
    assert main(["validate", source, "--out", str(tmp_path)]) == EXIT_PASS
    assert _read(tmp_path / "validation.json")["validation"]["status"] == "pass"


def test_validate_reports_subdiagram_violations(tmp_path):
    # e4 ends at w, which W_2 leaves out
    record = dict(FLAT_DOCUMENT, subdiagram={"W": [["v0"], ["u"], ["u"]], "F": ["e1", "e3", "e4"]})
    source = _write(tmp_path / "violating.json", record)
    assert main(["validate", source, "--out", str(tmp_path)]) == EXIT_FAIL
    validation = _read(tmp_path / "validation.json")["validation"]
    assert validation["status"] == "fail"
    assert any("e4" in violation for violation in validation["violations"])


def test_full_subdiagram_exhausts_at_the_counting_telescope(tmp_path):
    diagram, _ = two_vertex(4)
    sub = full_subdiagram(diagram)
    source = _write(tmp_path / "full.json", {"diagram": diagram.to_dict(), "subdiagram": sub.to_dict()})
    assert main(["split", source, "--out", str(tmp_path)]) == EXIT_EXHAUSTED
    assert not (tmp_path / "split_certificate.json").exists()


def test_resolution_beyond_the_telescoped_depth_is_checked(tmp_path):
    # two_vertex telescopes to 4 levels; resolution 4 still lies inside the 8 source levels
    code = main(["split", "fixture:two_vertex", "--resolution", "4", "--out", str(tmp_path)])
    assert code == EXIT_PASS
    report = _read(tmp_path / "report.json")
    minimality = next(r for r in report["reports"] if r["title"] == "minimality")
    assert minimality["parameters"]["depth"] == 8
    assert minimality["checks"][0]["status"] == "pass"


def test_resolution_at_the_source_depth_exhausts(tmp_path):
    code = main(["split", "fixture:two_vertex", "--resolution", "8", "--out", str(tmp_path)])
    assert code == EXIT_EXHAUSTED
    minimality = next(r for r in _read(tmp_path / "report.json")["reports"] if r["title"] == "minimality")
    assert minimality["checks"][0]["status"] == "skipped"


@pytest.mark.parametrize("args, outputs", [
    (["split", "fixture:merging", "--relation", "diagonal", "--resolution", "0", "--pdf"],
     ["split_certificate.json", "report.json", "report.md"]),
    (["absorb", "fixture:two_chain", "--depth", "4", "--relation", "full"],
     ["absorption_certificate.json", "report.json"]),
])
def test_reruns_are_byte_identical(tmp_path, args, outputs):
    first, second = tmp_path / "first", tmp_path / "second"
    for out in (first, second):
        main(args + ["--out", str(out)])
    for name in outputs:
        assert (first / name).read_bytes() == (second / name).read_bytes(), name
