"""
Bratteli Splitting Toolkit - Invariant Weightings
Exact rational vertex weightings q_n parametrizing tail-invariant measures
"""
import logging
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import sympy

from .diagram import BratteliDiagram, DiagramError, path_counts
from .paths import CylinderSet

logger = logging.getLogger(__name__)


class InvariantWeighting:
    """
    Vertex masses q_n(v) with q_0(v0) = 1 and q_{n-1}(v) = sum over edges e
    leaving v of q_n(r(e)). The cylinder of a depth-n path ending at v has mass q_n(v).
    """

    def __init__(self, levels: Sequence[Dict[str, Fraction]]):
        self.levels = [dict(level) for level in levels]

    def q(self, n: int, vertex: str) -> Fraction:
        return self.levels[n].get(vertex, Fraction(0))

    def cylinder_mass(self, diagram: BratteliDiagram, prefix: Sequence[str]) -> Fraction:
        return self.q(len(prefix), diagram.end_vertex(prefix))

    def measure(self, diagram: BratteliDiagram, cylinder: CylinderSet) -> Fraction:
        return sum((self.cylinder_mass(diagram, p) for p in cylinder.prefixes), Fraction(0))

    def path_set_mass(self, diagram: BratteliDiagram, paths: Sequence[Sequence[str]]) -> Fraction:
        """Mass of a set of full-depth paths, each counted as its own cylinder"""
        return sum((self.cylinder_mass(diagram, p) for p in paths), Fraction(0))

    def satisfies_recursion(self, diagram: BratteliDiagram) -> bool:
        if self.q(0, diagram.root) != 1:
            return False
        for n in range(1, len(self.levels)):
            for v in diagram.levels[n - 1]:
                expected = sum((self.q(n, e.range) for e in diagram.outgoing(n - 1, v)), Fraction(0))
                if self.q(n - 1, v) != expected:
                    return False
        return all(value >= 0 for level in self.levels for value in level.values())

    def total_mass(self, diagram: BratteliDiagram, n: int) -> Fraction:
        if n == 0:
            return self.q(0, diagram.root)
        table = path_counts(diagram, None, 0, n)
        return sum((table.count(diagram.root, v) * self.q(n, v) for v in diagram.levels[n]), Fraction(0))

    def lex_key(self, diagram: BratteliDiagram) -> tuple:
        return tuple(self.q(n, v) for n in range(1, len(self.levels)) for v in diagram.levels[n])

    def to_dict(self) -> Dict:
        return {"levels": [{v: str(q) for v, q in sorted(level.items())} for level in self.levels]}

    def __repr__(self):
        return f"InvariantWeighting(depth={len(self.levels) - 1})"


class WeightingPolytope:
    """Solution set of the weighting recursion at depth N

    lex_vertex is the lexicographic maximum over the single-vertex extreme points
    e_w / |E(v0,w)|, not over the whole solution set.
    """

    def __init__(self, dimension: int, vertices: List[InvariantWeighting], lex_vertex: InvariantWeighting,
                 unknowns: int, rank: int):
        self.dimension = dimension
        self.vertices = vertices
        self.lex_vertex = lex_vertex
        self.unknowns = unknowns
        self.rank = rank

    @property
    def unique(self) -> bool:
        return self.dimension == 0

    def get_summary(self) -> str:
        return (f"dimension {self.dimension} | {len(self.vertices)} extreme points | "
                f"{self.unknowns} unknowns, rank {self.rank}")

    def to_dict(self) -> Dict:
        return {
            "dimension": self.dimension,
            "unknowns": self.unknowns,
            "rank": self.rank,
            "extreme_points": [w.to_dict() for w in self.vertices],
            "lex_vertex": self.lex_vertex.to_dict(),
        }

    def __repr__(self):
        return f"WeightingPolytope({self.get_summary()})"


def _propagate(diagram: BratteliDiagram, top: Dict[str, Fraction], depth: int) -> InvariantWeighting:
    levels: List[Dict[str, Fraction]] = [dict() for _ in range(depth + 1)]
    levels[depth] = {v: top.get(v, Fraction(0)) for v in diagram.levels[depth]}
    for n in range(depth, 0, -1):
        levels[n - 1] = {
            v: sum((levels[n][e.range] for e in diagram.outgoing(n - 1, v)), Fraction(0))
            for v in diagram.levels[n - 1]
        }
    return InvariantWeighting(levels)


def _affine_rank(diagram: BratteliDiagram, depth: int) -> Dict[str, int]:
    index = {}
    for n in range(depth + 1):
        for v in diagram.levels[n]:
            index[(n, v)] = len(index)
    rows = []
    for n in range(1, depth + 1):
        for v in diagram.levels[n - 1]:
            row = [0] * len(index)
            row[index[(n - 1, v)]] += 1
            for e in diagram.outgoing(n - 1, v):
                row[index[(n, e.range)]] -= 1
            rows.append(row)
    normalization = [0] * len(index)
    normalization[index[(0, diagram.root)]] = 1
    rows.append(normalization)
    rank = sympy.Matrix(rows).rank()
    return {"unknowns": len(index), "rank": int(rank)}


def invariant_weightings(diagram: BratteliDiagram, depth: Optional[int] = None) -> WeightingPolytope:
    """
    Exact description of the invariant weightings at depth N.

    The extreme points put mass 1/|E(v0,w)| on a single vertex w of V_N and
    propagate it down the recursion; the dimension comes from the rank of the
    linear system.

    Args:
        diagram: Validated diagram
        depth: N (defaults to the diagram depth)

    Returns:
        WeightingPolytope with its extreme points and lex_vertex, the lexicographic maximum
        over the single-vertex extreme points (not over the whole solution set)
    """
    depth = diagram.depth if depth is None else depth
    if not 1 <= depth <= diagram.depth:
        raise DiagramError(f"Weighting depth {depth} outside 1..{diagram.depth}")
    table = path_counts(diagram, None, 0, depth)
    vertices = []
    for w in diagram.levels[depth]:
        count = table.count(diagram.root, w)
        if count == 0:
            raise DiagramError(f"vertex {w} at level {depth} is unreachable; the recursion is infeasible")
        vertices.append(_propagate(diagram, {w: Fraction(1, count)}, depth))
    system = _affine_rank(diagram, depth)
    dimension = system["unknowns"] - system["rank"]
    lex_vertex = max(vertices, key=lambda weighting: weighting.lex_key(diagram))
    logger.debug("weighting polytope of dimension %d at depth %d", dimension, depth)
    return WeightingPolytope(dimension, vertices, lex_vertex, system["unknowns"], system["rank"])


def min_source_paths(diagram: BratteliDiagram, n: int) -> int:
    """min over v in V_n of |E(v0, v)|"""
    if n == 0:
        return 1
    table = path_counts(diagram, None, 0, n)
    return min(table.count(diagram.root, v) for v in diagram.levels[n])
