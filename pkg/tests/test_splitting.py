import pytest

from core.diagram import HorizonExhausted
from core.fixtures import full_subdiagram, merging, two_chain, two_vertex
from core.paths import CylinderFunction, PartitionError, SubrelationPartition, y_paths
from core.splitting import (
    SplittingError, SurjectionFamily, build_rho, diagonal_sequence, extend_mu, retract, run_splitting,
    tail_sequence
)


def test_rho_cycles_through_f_paths():
    diagram, sub = merging(4)
    rho = build_rho(diagram, sub)
    assert rho.domain(2, "u") == ("uu2b", "uu2c", "wu2b")
    images = [rho.apply(2, e) for e in rho.domain(2, "u")]
    first, second = ("a1", "uu2a"), ("b1", "wu2a")
    assert images == [first, second, first]
    assert rho.preimage(2, "u", second) == "uu2c"
    assert SurjectionFamily.from_dict(rho.to_dict()).maps == rho.maps


def test_rho_rejects_f_edges():
    diagram, sub = merging(4)
    rho = build_rho(diagram, sub)
    with pytest.raises(SplittingError):
        rho.apply(2, "uu2a")


def test_rho_needs_the_counting_inequality():
    diagram, sub = two_vertex(3)
    with pytest.raises(SplittingError) as info:
        build_rho(diagram, sub)
    assert info.value.stage == "build_rho"
    assert info.value.witness["level"] == 1


def test_retract_follows_least_f_continuation():
    diagram, sub = two_chain(4)
    assert retract(diagram, sub, ("a1", "uu2a", "uw3", "wu4"), 4) == ("a1", "uu2a", "uu3a", "uu4a")
    assert retract(diagram, sub, ("b1", "ww2a"), 3) == ("b1", "ww2a", "ww3a")


def test_extend_mu_is_constant_along_retraction():
    diagram, sub = two_chain(4)
    ys = y_paths(diagram, sub, 4)
    mu = CylinderFunction.from_values(ys, [0, 1])
    extended = extend_mu(diagram, sub, mu, 1)
    assert extended.depth == 2
    assert extended(("a1", "uu2a", "uw3", "wu4")) == mu(ys[0])
    assert extended(("b1", "ww2a", "wu3", "uu4b")) == mu(ys[1])
    with pytest.raises(PartitionError):
        extended(("a1", "uw2", "wu3", "uu4a"))


def test_split_telescopes_and_restricts(two_vertex_split):
    context = two_vertex_split
    assert context.counting_plan.to_list() == [0, 2, 4, 6, 8]
    assert context.alignment_plan.is_identity(8)
    assert context.depth == 4
    assert len(context.y_paths) == 1
    for n in range(1, context.depth):
        assert context.rprimes[n].refines(context.tails[n])
        assert context.rprimes[n - 1].refines(context.rprimes[n])


def test_split_separates_merged_y_paths(merging_split):
    context = merging_split
    top = context.top_level
    ys = context.y_paths
    assert len(ys) == 2
    assert context.tails[top].same_class(ys[0], ys[1])
    assert not context.rprimes[top].same_class(ys[0], ys[1])
    for n in range(1, context.depth):
        assert context.rprimes[n].restrict(ys) == context.s_sequence[n]


def test_tail_sequence_keeps_merged_y_paths_together(merging_tail_split):
    context = merging_tail_split
    ys = context.y_paths
    assert context.rprimes[context.top_level].same_class(ys[0], ys[1])


def test_certificate_layout(merging_split):
    certificate = merging_split.to_certificate()
    assert certificate["format"] == "bratteli-split/1"
    assert certificate["depth"] == merging_split.depth
    assert [level["n"] for level in certificate["levels"]] == list(range(1, merging_split.depth))
    assert len(certificate["s_sequence"]) == merging_split.depth
    level = certificate["levels"][0]
    assert set(level) == {"n", "labels", "default_label", "mu_depth", "extension_depth", "u_depth",
                          "lambda", "partition_digest"}
    assert level["partition_digest"] == merging_split.rprimes[1].digest()


def test_split_rejects_sequence_outside_tail():
    diagram, sub = two_chain(4)
    ys = y_paths(diagram, sub, 4)
    with pytest.raises(SplittingError) as info:
        run_splitting(diagram, sub, [SubrelationPartition.full(ys)] * 4)
    assert info.value.stage == "check_nested"


def test_split_rejects_shrinking_sequence():
    diagram, sub = merging(4)
    ys = y_paths(diagram, sub, 4)
    sequence = [SubrelationPartition.full(ys)] + diagonal_sequence(ys, 3)
    with pytest.raises(SplittingError):
        run_splitting(diagram, sub, sequence)


def test_full_subdiagram_exhausts_counting_telescope():
    diagram, _ = two_vertex(4)
    sub = full_subdiagram(diagram)
    with pytest.raises(HorizonExhausted) as info:
        run_splitting(diagram, sub, tail_sequence(diagram, sub))
    assert info.value.stage == "counting_telescope"
