"""
Bratteli Splitting Toolkit - Fixture Zoo
Small named diagrams with thin subdiagrams, and seeded random simple diagrams
"""
import logging
import random
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .diagram import BratteliDiagram, DiagramError, Edge, Subdiagram, is_simple_at_horizon
from .paths import path_count

logger = logging.getLogger(__name__)

Fixture = Tuple[BratteliDiagram, Subdiagram]


def _build(levels: Sequence[Sequence[str]], edges: Sequence[Iterable[Tuple[str, str, str]]],
           f_ids: Iterable[str]) -> Fixture:
    diagram = BratteliDiagram(levels, [[Edge(*spec) for spec in level] for level in edges])
    return diagram, Subdiagram.generated_by(diagram, f_ids)


def _two_vertex_levels(depth: int) -> List[List[str]]:
    return [["v0"]] + [["u", "w"] for _ in range(depth)]


def odometer(depth: int = 8) -> Fixture:
    """One vertex per level, edges a_n and b_n; Y is the chain of a-edges"""
    levels = [["v0"]] + [["v"] for _ in range(depth)]
    edges = [[(f"a{n}", levels[n - 1][0], "v"), (f"b{n}", levels[n - 1][0], "v")] for n in range(1, depth + 1)]
    return _build(levels, edges, [f"a{n}" for n in range(1, depth + 1)])


def two_vertex(depth: int = 8) -> Fixture:
    """All-ones 2x2 incidence; Y runs through u"""
    edges = [[("a1", "v0", "u"), ("b1", "v0", "w")]]
    for n in range(2, depth + 1):
        edges.append([(f"uu{n}", "u", "u"), (f"uw{n}", "u", "w"), (f"wu{n}", "w", "u"), (f"ww{n}", "w", "w")])
    return _build(_two_vertex_levels(depth), edges, ["a1"] + [f"uu{n}" for n in range(2, depth + 1)])


def primitive(depth: int = 8) -> Fixture:
    """Incidence [[1,1],[1,0]]: w only feeds back into u"""
    edges = [[("a1", "v0", "u"), ("b1", "v0", "w")]]
    for n in range(2, depth + 1):
        edges.append([(f"uu{n}", "u", "u"), (f"uw{n}", "u", "w"), (f"wu{n}", "w", "u")])
    return _build(_two_vertex_levels(depth), edges, ["a1"] + [f"uu{n}" for n in range(2, depth + 1)])


def stationary(depth: int = 8) -> Fixture:
    """Incidence [[2,1],[1,1]] with Y along one of the two u-loops"""
    edges = [[("a1", "v0", "u"), ("b1", "v0", "w")]]
    for n in range(2, depth + 1):
        edges.append([(f"uu{n}a", "u", "u"), (f"uu{n}b", "u", "u"), (f"uw{n}", "u", "w"),
                      (f"wu{n}", "w", "u"), (f"ww{n}", "w", "w")])
    return _build(_two_vertex_levels(depth), edges, ["a1"] + [f"uu{n}a" for n in range(2, depth + 1)])


def two_chain(depth: int = 8) -> Fixture:
    """Two disjoint F-chains, one through u and one through w"""
    edges = [[("a1", "v0", "u"), ("c1", "v0", "u"), ("b1", "v0", "w"), ("d1", "v0", "w")]]
    for n in range(2, depth + 1):
        edges.append([(f"uu{n}a", "u", "u"), (f"uu{n}b", "u", "u"), (f"uw{n}", "u", "w"),
                      (f"wu{n}", "w", "u"), (f"ww{n}a", "w", "w"), (f"ww{n}b", "w", "w")])
    f_ids = ["a1", "b1"] + [f"{e}{n}a" for n in range(2, depth + 1) for e in ("uu", "ww")]
    return _build(_two_vertex_levels(depth), edges, f_ids)


def merging(depth: int = 6) -> Fixture:
    """Two F-paths that merge at level 2 into a single chain through u"""
    edges = [[("a1", "v0", "u"), ("c1", "v0", "u"), ("b1", "v0", "w"), ("d1", "v0", "w")]]
    for n in range(2, depth + 1):
        edges.append([(f"uu{n}a", "u", "u"), (f"uu{n}b", "u", "u"), (f"uu{n}c", "u", "u"), (f"uw{n}", "u", "w"),
                      (f"wu{n}a", "w", "u"), (f"wu{n}b", "w", "u"), (f"ww{n}", "w", "w")])
    f_ids = ["a1", "b1"] + [f"uu{n}a" for n in range(2, depth + 1)] + (["wu2a"] if depth >= 2 else [])
    return _build(_two_vertex_levels(depth), edges, f_ids)


def disconnected(depth: int = 8) -> Fixture:
    """Two vertices that never communicate: not simple"""
    edges = [[("a1", "v0", "u"), ("c1", "v0", "u"), ("b1", "v0", "w"), ("d1", "v0", "w")]]
    for n in range(2, depth + 1):
        edges.append([(f"uu{n}a", "u", "u"), (f"uu{n}b", "u", "u"), (f"ww{n}a", "w", "w"), (f"ww{n}b", "w", "w")])
    return _build(_two_vertex_levels(depth), edges, ["a1"] + [f"uu{n}a" for n in range(2, depth + 1)])


def full_subdiagram(diagram: BratteliDiagram) -> Subdiagram:
    """F = E, which can never be thin"""
    return Subdiagram.generated_by(diagram, [e.id for level in diagram.edges for e in level])


def random_simple_diagram(
    rng: random.Random,
    depth: int = 8,
    max_vertices: int = 4,
    max_edges: int = 6,
    max_paths: int = 20000,
    attempts: int = 200
) -> Fixture:
    """
    Random simple diagram with a single F-chain through the first vertex of each level.

    Every vertex gets an incoming and an outgoing edge from a covering pass; extra
    edges are then drawn at random. Draws that are not simple within the depth or
    have more than ``max_paths`` paths are discarded.

    Raises:
        DiagramError: If no draw qualifies within ``attempts``
    """
    for _ in range(attempts):
        levels = [["v0"]] + [[f"v{n}_{i}" for i in range(rng.randint(1, max_vertices))] for n in range(1, depth + 1)]
        edges = []
        for n in range(1, depth + 1):
            below, above = levels[n - 1], levels[n]
            pairs = [(below[i % len(below)], above[i % len(above)]) for i in range(max(len(below), len(above)))]
            extra = rng.randint(0, max(0, max_edges - len(pairs)))
            pairs += [(rng.choice(below), rng.choice(above)) for _ in range(extra)]
            edges.append([(f"e{n}_{j}", s, r) for j, (s, r) in enumerate(pairs)])
        diagram, sub = _build(levels, edges, [f"e{n}_0" for n in range(1, depth + 1)])
        if not is_simple_at_horizon(diagram).simple:
            continue
        if path_count(diagram, depth) > max_paths:
            continue
        return diagram, sub
    raise DiagramError(f"no simple diagram within {max_paths} paths after {attempts} draws")


def random_suite(seed: int = 42, count: int = 20, depth: int = 8) -> List[Fixture]:
    rng = random.Random(seed)
    return [random_simple_diagram(rng, depth) for _ in range(count)]


FIXTURES: Dict[str, Callable[..., Fixture]] = {
    "odometer": odometer,
    "two_vertex": two_vertex,
    "primitive": primitive,
    "stationary": stationary,
    "two_chain": two_chain,
    "merging": merging,
    "disconnected": disconnected,
}


def load_fixture(name: str, depth: Optional[int] = None) -> Fixture:
    try:
        builder = FIXTURES[name]
    except KeyError:
        raise DiagramError(f"Unknown fixture {name!r}; known: {', '.join(sorted(FIXTURES))}")
    return builder() if depth is None else builder(depth)
