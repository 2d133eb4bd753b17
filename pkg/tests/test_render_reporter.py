import pytest

from core.fixtures import full_subdiagram, odometer
from core.oracle import CertificateView, check_main1
from core.render import BASE_COLOR, REPLICA_COLOR, to_dot
from core.reporter import ReportData, generate_preview_text


def test_dot_has_one_rank_per_level():
    diagram, sub = odometer(3)
    dot = to_dot(diagram, [(sub, BASE_COLOR)], "odometer")
    assert dot.startswith("digraph bratteli {")
    assert dot.count("rank = same") == 4
    assert 'label = "odometer";' in dot
    assert '"0:v0" -> "1:v" [tooltip = "a1", color = blue, penwidth = 2.5, style = bold];' in dot
    assert '"0:v0" -> "1:v" [tooltip = "b1"];' in dot


def test_first_layer_wins_on_shared_edges():
    diagram, sub = odometer(2)
    dot = to_dot(diagram, [(sub, BASE_COLOR), (full_subdiagram(diagram), REPLICA_COLOR)])
    assert 'tooltip = "a1", color = blue' in dot
    assert 'tooltip = "b1", color = red' in dot


@pytest.fixture(scope="module")
def report_data(merging_split):
    certificate = merging_split.to_certificate()
    view = CertificateView(certificate)
    data = ReportData.from_view(view, certificate, "merging.json")
    data.reports = [check_main1(view)]
    return data


def test_report_data_dict(report_data, merging_split):
    record = report_data.to_dict()
    assert record["format"] == "bratteli-split/1"
    assert record["status"] == "pass"
    assert record["depth"] == merging_split.depth
    assert record["y_count"] == 2
    assert set(record["class_counts"]) == {str(n) for n in range(merging_split.depth)}
    assert record["mutation"] is None
    assert "generation_date" not in record


def test_preview_text(report_data):
    text = generate_preview_text(report_data)
    assert "**Verdict:** PASS" in text
    assert "## Split Levels" in text
    assert "## Splitting conclusions" in text
    assert "| restriction | pass |" in text


def test_preview_has_no_wall_clock(report_data):
    text = generate_preview_text(report_data)
    assert "Generated" not in text
    assert text == generate_preview_text(report_data)
    assert "**Certificate:** merging.json (bratteli-split/1)" in text
