import copy
from fractions import Fraction

import pytest

from core.diagram import DiagramError, HorizonExhausted
from core.fixtures import load_fixture, random_suite
from core.oracle import (
    FAIL, PASS, SKIPPED, CertificateView, OracleError, check_lemma_clauses, check_main1, check_measure,
    check_minimality_approx, mutation_sweep
)
from core.paths import path_id, y_paths
from core.splitting import diagonal_sequence, run_splitting


@pytest.fixture(scope="module")
def merging_certificate(merging_split):
    return merging_split.to_certificate()


def test_view_rebuilds_the_split(merging_split, merging_certificate):
    view = CertificateView(merging_certificate)
    assert view.depth == merging_split.depth
    assert view.ys == merging_split.y_paths
    for n in range(view.depth):
        assert view.rprimes[n] == merging_split.rprimes[n]


def test_view_rejects_other_documents(merging_certificate):
    with pytest.raises(OracleError):
        CertificateView({"format": "something-else"})
    broken = dict(merging_certificate)
    del broken["levels"]
    with pytest.raises(OracleError):
        CertificateView(broken)


@pytest.mark.parametrize("split", ["merging_split", "merging_tail_split", "two_vertex_split", "two_chain_split"])
def test_constructions_pass_every_clause(split, request):
    context = request.getfixturevalue(split)
    report = check_lemma_clauses(context)
    assert report.passed, report.failures()
    assert all(result.status == PASS for result in report.results)
    main = check_main1(context)
    assert main.passed, main.failures()
    assert main.get("minimality").status == SKIPPED


def test_slack_skips_frontier_levels(merging_certificate):
    view = CertificateView(merging_certificate)
    report = check_lemma_clauses(view, slack=2)
    result = report.get("clause_1")
    assert result.skipped_levels == [view.depth - 1]
    assert max(result.levels) == view.depth - 2

    everything_skipped = check_lemma_clauses(view, slack=view.depth)
    assert all(result.status == SKIPPED for result in everything_skipped.results)


def test_wrong_s_sequence_is_caught(merging_certificate):
    view = CertificateView(merging_certificate)
    tampered = copy.deepcopy(merging_certificate)
    top = view.top
    tampered["s_sequence"][top - 1] = [[path_id(y) for y in view.ys]]
    report = check_main1(tampered)
    assert report.get("restriction").status == FAIL
    assert report.get("restriction").witness["level"] == top


def test_view_recovers_source_paths(two_vertex_split):
    view = CertificateView(two_vertex_split.to_certificate())
    assert view.source_levels == [two_vertex_split.alignment_plan.to_list()[level]
                                  for level in two_vertex_split.counting_plan.to_list()]
    assert view.source_depth == 8
    assert all(len(view.source_path(x)) == 8 for x in view.universe)


def test_minimality_passes_at_low_resolution(two_vertex_split, two_chain_split):
    report = check_minimality_approx(two_vertex_split, 2)
    assert report.passed
    assert report.get("minimality").detail == "minimality verified at resolution (2, 8)"
    assert check_minimality_approx(two_chain_split, 1).passed
    assert check_minimality_approx(two_chain_split, 0).get("minimality").status == PASS


def test_minimality_resolution_counts_source_levels(two_vertex_split):
    # resolution 4 equals the telescoped depth but lies well inside the source depth
    assert two_vertex_split.depth == 4
    report = check_minimality_approx(two_vertex_split, 4)
    assert report.get("minimality").status == PASS
    assert report.parameters["depth"] == 8


def test_minimality_exhausts_on_disconnected_diagram(disconnected_split):
    with pytest.raises(HorizonExhausted) as info:
        check_minimality_approx(disconnected_split, 1)
    assert info.value.stage == "minimality"


def test_minimality_resolution_bounds(two_chain_split):
    with pytest.raises(HorizonExhausted) as info:
        check_minimality_approx(two_chain_split, 6)
    assert info.value.stage == "minimality"
    with pytest.raises(DiagramError):
        check_minimality_approx(two_chain_split, -1)


def test_measure_checks_pass(merging_split, two_chain_split):
    for context in (merging_split, two_chain_split):
        report = check_measure(context, samples=6, seed=7)
        assert report.passed, report.failures()
        assert set(report.parameters["u_measures"]) == {str(n) for n in range(1, context.depth)}


def test_mutation_sweep_accounts_for_every_flip(merging_certificate):
    report = mutation_sweep(merging_certificate, samples=12, seed=3)
    assert report.total == min(12, sum(len(level["lambda"]["table"]) for level in merging_certificate["levels"]))
    assert report.unobservable + report.detected + len(report.escaped) == report.total
    assert 0 <= report.detection_rate <= 1
    assert report.to_dict()["total"] == report.total


def test_mutation_detection_rate(merging_certificate):
    entries = sum(len(level["lambda"]["table"]) for level in merging_certificate["levels"])
    report = mutation_sweep(merging_certificate, samples=entries, seed=42)
    assert report.total == entries
    assert report.detection_rate >= Fraction(98, 100), report.escaped


SIMPLE_FIXTURES = ["odometer", "two_vertex", "primitive", "stationary", "two_chain", "merging"]


def _split_at_depth_8(diagram, sub):
    return run_splitting(diagram, sub, diagonal_sequence(y_paths(diagram, sub, 8), 8))


@pytest.mark.parametrize("name", SIMPLE_FIXTURES)
def test_fixture_zoo_passes_every_checker(name):
    view = CertificateView(_split_at_depth_8(*load_fixture(name, 8)).to_certificate())
    assert view.source_depth == 8
    for report in (check_lemma_clauses(view), check_main1(view), check_measure(view, samples=4, seed=1)):
        assert report.passed, (report.title, report.failures())
    minimality = check_minimality_approx(view, 2)
    assert minimality.get("minimality").detail == "minimality verified at resolution (2, 8)"


@pytest.mark.parametrize("index", range(20))
def test_random_suite_never_fails_minimality(index):
    diagram, sub = random_suite(seed=42, count=20, depth=8)[index]
    view = CertificateView(_split_at_depth_8(diagram, sub).to_certificate())
    assert check_lemma_clauses(view).passed
    assert check_main1(view).passed
    try:
        report = check_minimality_approx(view, 2)
    except HorizonExhausted as e:
        assert e.stage == "minimality"
    else:
        assert report.get("minimality").status == PASS, report.get("minimality").witness
