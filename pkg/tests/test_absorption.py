import copy

import pytest

from core.absorption import (
    TAIL_SECTOR, AbsorptionError, QSequence, UnsupportedQ, build_copies_space, build_S, build_Z_diagram,
    run_absorption
)
from core.diagram import HorizonExhausted, validate
from core.fixtures import disconnected, merging, odometer, two_chain
from core.oracle import FAIL, PASS, OracleError, check_absorption
from core.paths import path_id, tail_relation, y_paths


@pytest.fixture(scope="module")
def chain4():
    return two_chain(4)


@pytest.fixture(scope="module")
def full_q_absorption(chain4):
    diagram, sub = chain4
    return run_absorption(diagram, sub, QSequence.full(y_paths(diagram, sub, 4)), copies=2)


@pytest.fixture(scope="module")
def full_q_certificate(full_q_absorption):
    return full_q_absorption.to_certificate()


def test_q_sequence_must_be_nested(chain4):
    diagram, sub = chain4
    ys = y_paths(diagram, sub, 4)
    with pytest.raises(AbsorptionError):
        QSequence.from_classes(ys, [[ys], []])
    with pytest.raises(AbsorptionError):
        QSequence(ys, [])


def test_q_sequence_lookup(chain4):
    diagram, sub = chain4
    q = QSequence.tails(diagram, sub)
    assert q.length == 3
    assert q.at(7) == q.last
    assert q.truncated(1).length == 1
    assert QSequence.full(q.universe).at(1).class_count == 1
    with pytest.raises(AbsorptionError):
        q.at(0)


def test_copies_space_relations(chain4):
    diagram, sub = chain4
    ys = y_paths(diagram, sub, 4)
    space = build_copies_space(ys, QSequence.full(ys), 2, 4)
    assert len(space.points) == 3 * len(ys)
    assert space.tail_sector == 3
    assert space.point_id((3, ys[0])) == f"{TAIL_SECTOR}|{path_id(ys[0])}"
    assert space.tilde(1).same_class((1, ys[0]), (1, ys[1]))
    assert not space.tilde(1).same_class((2, ys[0]), (2, ys[1]))
    assert space.tilde(2).same_class((2, ys[0]), (2, ys[1]))
    assert not space.tilde(4).same_class((3, ys[0]), (3, ys[1]))

    s_relation = build_S(space, tail_relation(diagram, 3, universe=ys))
    assert not s_relation.same_class((1, ys[0]), (1, ys[1]))


def test_replica_tail_classes_follow_q_tilde(chain4):
    diagram, sub = chain4
    ys = y_paths(diagram, sub, 4)
    space = build_copies_space(ys, QSequence.full(ys), 2, 4)
    replica = build_Z_diagram(space)
    assert validate(replica.diagram, replica.sub).passed
    paths = [replica.encoding[point] for point in space.points]
    assert len(set(paths)) == len(paths)
    for n in range(1, 5):
        tails = tail_relation(replica.diagram, n, universe=paths)
        assert tails.pullback(replica.encoding.__getitem__, space.points) == space.tilde(n)


def test_absorption_passes_with_identity_plans(full_q_absorption, chain4):
    result = full_q_absorption
    assert result.passed
    assert result.support == "finite-Y"
    assert result.context.counting_plan.is_identity(4)
    assert result.context.alignment_plan.is_identity(4)
    assert result.embedding.is_injective()
    assert result.embedding.y_image == y_paths(*chain4, 4)


def test_shift_moves_each_copy_up(full_q_absorption):
    result = full_q_absorption
    pi, shift = result.embedding.pi, result.shift
    for y in result.copies.ys:
        assert shift(y) == pi[(1, y)]
        assert shift(pi[(1, y)]) == pi[(2, y)]
        assert shift(pi[(2, y)]) == pi[(3, y)]
    assert shift.is_injective()
    assert len(shift.active) == 2 * len(result.copies.ys)


def test_certificate_checks_pass(full_q_certificate):
    report = check_absorption(full_q_certificate)
    assert report.passed, report.failures()
    assert {result.name for result in report.results} == {
        "embedding_injective", "embedding_transport", "disjointness", "shift_definition",
        "transport_rprime", "transport_q", "join_identity", "q_pullback",
    }
    assert full_q_certificate["transport"] == {
        "transport_rprime": "pass", "transport_q": "pass", "join_identity": "pass", "q_pullback": "pass",
    }


def test_swapped_shift_is_caught(full_q_certificate):
    tampered = copy.deepcopy(full_q_certificate)
    y1 = tampered["y_image"][0]
    first_copy = tampered["embedding"][f"1|{y1}"]
    shift = tampered["shift"]
    shift[y1], shift[first_copy] = shift[first_copy], shift[y1]
    report = check_absorption(tampered)
    for name in ("shift_definition", "transport_q", "join_identity", "q_pullback"):
        assert report.get(name).status == FAIL, name
    assert report.get("transport_rprime").status == PASS


def test_no_copies_is_vacuous():
    diagram, sub = odometer(4)
    result = run_absorption(diagram, sub, QSequence.tails(diagram, sub), copies=0)
    assert result.support == "prefix-determined"
    report = check_absorption(result.to_certificate())
    assert report.passed
    assert report.get("transport_rprime").detail.startswith("vacuous")


def test_too_many_copies():
    diagram, sub = odometer(4)
    with pytest.raises(AbsorptionError):
        run_absorption(diagram, sub, QSequence.tails(diagram, sub), copies=4)


def test_q_must_contain_the_tail_relation():
    diagram, sub = merging(4)
    with pytest.raises(AbsorptionError):
        run_absorption(diagram, sub, QSequence.diagonal(y_paths(diagram, sub, 4)))


def test_large_y_needs_prefix_determined_q(chain4):
    diagram, sub = chain4
    with pytest.raises(UnsupportedQ):
        run_absorption(diagram, sub, QSequence.full(y_paths(diagram, sub, 4)), finite_y_limit=1)


def test_base_must_be_simple():
    diagram, sub = disconnected(4)
    with pytest.raises(HorizonExhausted) as info:
        run_absorption(diagram, sub, QSequence.tails(diagram, sub))
    assert info.value.stage == "embed_replica"


def test_check_absorption_rejects_split_certificates(full_q_certificate):
    with pytest.raises(OracleError):
        check_absorption(full_q_certificate["split"])
