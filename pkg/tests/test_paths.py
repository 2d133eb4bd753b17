import pytest
from hypothesis import given, settings, strategies as st

from core.fixtures import merging, odometer, two_vertex
from core.paths import (
    CylinderFunction, CylinderSet, PartitionError, PathCapExceeded, SubrelationPartition,
    check_nested, enumerate_paths, parse_path_id, path_id, realize_label_map, saturate,
    tail_relation, y_paths
)

UNIVERSE = list(range(8))
labelings = st.lists(st.integers(min_value=0, max_value=3), min_size=len(UNIVERSE), max_size=len(UNIVERSE))


def test_path_ids():
    assert path_id(("a1", "uu2")) == "a1/uu2"
    assert parse_path_id("a1/uu2") == ("a1", "uu2")
    assert parse_path_id("") == ()


def test_enumeration_is_lexicographic_and_capped():
    diagram, sub = odometer(4)
    paths = enumerate_paths(diagram, 4)
    assert len(paths) == 16
    assert paths[0] == ("a1", "a2", "a3", "a4")
    assert paths == sorted(paths)
    assert y_paths(diagram, sub, 4) == [("a1", "a2", "a3", "a4")]
    with pytest.raises(PathCapExceeded):
        enumerate_paths(diagram, 4, cap=10)


def test_tail_relation_classes():
    diagram, _ = odometer(4)
    assert tail_relation(diagram, 0).class_count == 16
    assert tail_relation(diagram, 2).class_count == 4
    assert tail_relation(diagram, 4).class_count == 1
    r2 = tail_relation(diagram, 2)
    assert r2.same_class(("a1", "b2", "a3", "b4"), ("b1", "a2", "a3", "b4"))
    assert not r2.same_class(("a1", "a2", "a3", "b4"), ("a1", "a2", "b3", "b4"))


def test_top_tail_relation_keeps_endpoints():
    diagram, _ = two_vertex(3)
    top = tail_relation(diagram, 3)
    assert top.class_count == len(diagram.levels[3]) == 2
    assert sorted(top.class_sizes()) == [4, 4]


def test_tail_relations_are_nested():
    diagram, _ = two_vertex(4)
    universe = enumerate_paths(diagram, 4)
    tails = [tail_relation(diagram, n, universe=universe) for n in range(5)]
    for lower, upper in zip(tails, tails[1:]):
        assert lower.refines(upper)


def test_labels_renumbered_by_first_appearance():
    partition = SubrelationPartition(["x", "y", "z"], ["b", "a", "b"])
    assert partition.labels == (0, 1, 0)
    assert partition.classes() == [("x", "z"), ("y",)]
    assert partition.class_sizes() == [2, 1]


def test_from_classes_rejects_overlap_and_strangers():
    assert SubrelationPartition.from_classes("abc", [["a", "c"]]).classes() == [("a", "c"), ("b",)]
    with pytest.raises(PartitionError):
        SubrelationPartition.from_classes("abc", [["a"], ["a", "b"]])
    with pytest.raises(PartitionError):
        SubrelationPartition.from_classes("abc", [["d"]])


def test_restrict_pullback_and_image():
    partition = SubrelationPartition.from_classes(range(6), [[0, 1, 2], [3, 4]])
    assert partition.restrict([1, 2, 5]).classes() == [(1, 2), (5,)]
    pulled = partition.pullback(lambda x: x + 3, [0, 1, 2])
    assert pulled.classes() == [(0, 1), (2,)]
    image = SubrelationPartition.from_classes([0, 1, 2], [[0, 1]]).image(lambda x: x * 2, [0, 2, 4, 6])
    assert image.classes() == [(0, 2), (4,), (6,)]
    with pytest.raises(PartitionError):
        partition.restrict([7])


def test_mismatch_returns_a_witness_pair():
    diagonal = SubrelationPartition.diagonal("abc")
    full = SubrelationPartition.full("abc")
    assert diagonal.mismatch(full) == ("a", "b")
    assert diagonal.mismatch(SubrelationPartition.diagonal("abc")) is None
    assert diagonal.digest() == SubrelationPartition.diagonal("abc").digest()


@given(labelings, labelings)
@settings(max_examples=60, deadline=None)
def test_join_is_the_least_common_coarsening(first, second):
    a = SubrelationPartition(UNIVERSE, first)
    b = SubrelationPartition(UNIVERSE, second)
    joined = a.join(b)
    assert a.refines(joined) and b.refines(joined)
    coarsest = SubrelationPartition.full(UNIVERSE)
    assert joined.refines(coarsest)
    for x in UNIVERSE:
        for y in UNIVERSE:
            if a.same_class(x, y) or b.same_class(x, y):
                assert joined.same_class(x, y)


@given(labelings)
@settings(max_examples=60, deadline=None)
def test_refine_by_stays_inside(labels):
    partition = SubrelationPartition(UNIVERSE, labels)
    finer = partition.refine_by(lambda x: x % 2)
    assert finer.refines(partition)
    assert saturate(partition, [0]) == frozenset(partition.class_of(0))


def test_cylinder_sets():
    diagram, sub = two_vertex(4)
    cylinder = CylinderSet.y_cylinder(diagram, sub, 2)
    assert cylinder.prefixes == {("a1", "uu2")}
    assert ("a1", "uu2", "uw3", "wu4") in cylinder
    assert ("a1", "uw2", "wu3", "uu4") not in cylinder
    with pytest.raises(PartitionError):
        CylinderSet(2, [("a1",)])


def test_cylinder_function_finds_least_depth():
    paths = [("a", "x"), ("a", "y"), ("b", "x"), ("b", "y")]
    function = CylinderFunction.from_values(paths, [0, 0, 1, 1])
    assert function.depth == 1
    assert function(("b", "y", "z")) == 1
    assert CylinderFunction.from_dict(function.to_dict()).table == function.table
    with pytest.raises(PartitionError):
        CylinderFunction.from_values(paths, [0, 1, 0, 1], depth=1)
    with pytest.raises(PartitionError):
        function(("c",))
    assert CylinderFunction.constant(3)(("anything",)) == 3


def test_realize_label_map_ranks_classes():
    paths = [("a",), ("b",), ("c",)]
    relation = SubrelationPartition.full(paths)
    sub_relation = SubrelationPartition.from_classes(paths, [[("a",), ("c",)]])
    label_map = realize_label_map(relation, sub_relation)
    assert label_map.labels == (0, 1)
    assert label_map.default_label == 0
    assert [label_map.function(p) for p in paths] == [0, 1, 0]
    assert label_map.relation(relation, paths) == sub_relation


def test_realize_label_map_needs_a_subrelation():
    paths = [("a",), ("b",)]
    with pytest.raises(PartitionError):
        realize_label_map(SubrelationPartition.diagonal(paths), SubrelationPartition.full(paths))


def test_check_nested_alignment():
    diagram, sub = merging(6)
    ys = y_paths(diagram, sub, 6)
    universe = enumerate_paths(diagram, 6)
    tails = [tail_relation(diagram, n, universe=universe).restrict(ys) for n in range(7)]
    full = [SubrelationPartition.full(ys) for _ in range(6)]
    report = check_nested(full, tails)
    assert report.indices == [2] * 6
    assert report.alignment == [0, 2, 3, 4, 5, 6]
    assert report.assignment == [-1, 0, 1, 2, 3, 4]

    diagonal = [SubrelationPartition.diagonal(ys) for _ in range(6)]
    assert check_nested(diagonal, tails).alignment == [0, 1, 2, 3, 4, 5, 6]


def test_check_nested_rejects_decreasing_sequence():
    diagram, sub = merging(4)
    ys = y_paths(diagram, sub, 4)
    tails = [tail_relation(diagram, n).restrict(ys) for n in range(5)]
    with pytest.raises(PartitionError):
        check_nested([SubrelationPartition.full(ys), SubrelationPartition.diagonal(ys)], tails)
    with pytest.raises(PartitionError):
        check_nested([], tails)
