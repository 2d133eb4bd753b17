"""
Bratteli Splitting Toolkit - Diagram Core
Standard Bratteli diagrams, subdiagrams, path counts and telescoping
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

Path = Tuple[str, ...]

SEGMENT_JOINER = "."


class DiagramError(Exception):
    """Custom exception for malformed diagrams, levels and plans"""
    pass


class HorizonExhausted(Exception):
    """Raised when a search needs levels beyond the truncation depth"""

    def __init__(self, message: str, stage: str = "", best_ratio: Optional[Fraction] = None):
        super().__init__(message)
        self.stage = stage
        self.best_ratio = best_ratio


@dataclass(frozen=True)
class Edge:
    """Edge of E_n with stable identity, source in V_{n-1} and range in V_n"""
    id: str
    source: str
    range: str

    def to_dict(self) -> Dict[str, str]:
        return {"id": self.id, "s": self.source, "r": self.range}


class BratteliDiagram:
    """
    Leveled multigraph truncated at depth N.

    ``levels[n]`` lists the vertex names of V_n and ``edges[n-1]`` holds E_n.
    Vertices are identified by (level, name); edge ids are global. The
    constructor does not enforce the structural invariants, use
    :func:`validate` for that.
    """

    def __init__(self, levels: Sequence[Sequence[str]], edges: Sequence[Iterable[Edge]]):
        self.levels: Tuple[Tuple[str, ...], ...] = tuple(tuple(level) for level in levels)
        self.edges: Tuple[Tuple[Edge, ...], ...] = tuple(
            tuple(sorted(level, key=lambda e: e.id)) for level in edges
        )
        self._by_id: Dict[str, Tuple[int, Edge]] = {}
        self._out: Dict[Tuple[int, str], List[Edge]] = {}
        self._in: Dict[Tuple[int, str], List[Edge]] = {}
        for n, level in enumerate(self.edges, start=1):
            for edge in level:
                self._by_id.setdefault(edge.id, (n, edge))
                self._out.setdefault((n - 1, edge.source), []).append(edge)
                self._in.setdefault((n, edge.range), []).append(edge)

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    @property
    def root(self) -> str:
        if not self.levels or not self.levels[0]:
            raise DiagramError("Diagram has no source vertex")
        return self.levels[0][0]

    def edge(self, edge_id: str) -> Edge:
        try:
            return self._by_id[edge_id][1]
        except KeyError:
            raise DiagramError(f"Unknown edge: {edge_id}")

    def level_of(self, edge_id: str) -> int:
        try:
            return self._by_id[edge_id][0]
        except KeyError:
            raise DiagramError(f"Unknown edge: {edge_id}")

    def has_edge(self, edge_id: str) -> bool:
        return edge_id in self._by_id

    def outgoing(self, n: int, vertex: str) -> Tuple[Edge, ...]:
        """Edges of E_{n+1} leaving ``vertex`` in V_n, in id order"""
        return tuple(self._out.get((n, vertex), ()))

    def incoming(self, n: int, vertex: str) -> Tuple[Edge, ...]:
        """Edges of E_n arriving at ``vertex`` in V_n, in id order"""
        return tuple(self._in.get((n, vertex), ()))

    def end_vertex(self, path: Sequence[str]) -> str:
        if not path:
            return self.root
        return self.edge(path[-1]).range

    def vertex_index(self, n: int) -> Dict[str, int]:
        return {v: i for i, v in enumerate(self.levels[n])}

    def edge_count(self, n: int) -> int:
        return len(self.edges[n - 1])

    def incidence(self, n: int, allowed: Optional[Iterable[str]] = None) -> np.ndarray:
        """
        Incidence matrix of E_n as exact integers.

        Args:
            n: Edge level, 1 <= n <= N
            allowed: Optional set of edge ids to count (e.g. F)

        Returns:
            Object array of shape (|V_{n-1}|, |V_n|) holding Python ints
        """
        if not 1 <= n <= self.depth:
            raise DiagramError(f"Edge level {n} outside 1..{self.depth}")
        allowed = None if allowed is None else frozenset(allowed)
        rows = self.vertex_index(n - 1)
        cols = self.vertex_index(n)
        matrix = np.zeros((len(rows), len(cols)), dtype=object)
        for edge in self.edges[n - 1]:
            if allowed is not None and edge.id not in allowed:
                continue
            matrix[rows[edge.source], cols[edge.range]] += 1
        return matrix

    def truncate(self, depth: int) -> "BratteliDiagram":
        if not 0 <= depth <= self.depth:
            raise DiagramError(f"Cannot truncate depth {self.depth} diagram to {depth}")
        return BratteliDiagram(self.levels[:depth + 1], self.edges[:depth])

    def to_dict(self) -> Dict:
        return {
            "levels": [list(level) for level in self.levels],
            "edges": [[edge.to_dict() for edge in level] for level in self.edges],
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "BratteliDiagram":
        try:
            levels = data["levels"]
            edges = [
                [Edge(str(item["id"]), str(item["s"]), str(item["r"])) for item in level]
                for level in data["edges"]
            ]
        except (KeyError, TypeError) as e:
            raise DiagramError(f"Malformed diagram record: {str(e)}")
        return cls(levels, edges)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BratteliDiagram):
            return NotImplemented
        return self.levels == other.levels and self.edges == other.edges

    __hash__ = None

    def __repr__(self):
        vertices = sum(len(level) for level in self.levels)
        edges = sum(len(level) for level in self.edges)
        return f"BratteliDiagram(depth={self.depth}, vertices={vertices}, edges={edges})"


class Subdiagram:
    """Per-level vertex sets W_n and an edge-id set F defining Y"""

    def __init__(self, vertices: Sequence[Iterable[str]], edges: Iterable[str]):
        self.vertices: Tuple[frozenset, ...] = tuple(frozenset(level) for level in vertices)
        self.edges: frozenset = frozenset(edges)

    @classmethod
    def generated_by(cls, diagram: BratteliDiagram, edge_ids: Iterable[str]) -> "Subdiagram":
        """Subdiagram with W = r(F) together with v0"""
        edge_ids = frozenset(edge_ids)
        vertices = [set() for _ in diagram.levels]
        vertices[0].add(diagram.root)
        for edge_id in edge_ids:
            vertices[diagram.level_of(edge_id)].add(diagram.edge(edge_id).range)
        return cls(vertices, edge_ids)

    def __contains__(self, edge_id: str) -> bool:
        return edge_id in self.edges

    def vertices_at(self, n: int) -> frozenset:
        if 0 <= n < len(self.vertices):
            return self.vertices[n]
        return frozenset()

    def edges_at(self, diagram: BratteliDiagram, n: int) -> Tuple[Edge, ...]:
        return tuple(e for e in diagram.edges[n - 1] if e.id in self.edges)

    def truncate(self, diagram: BratteliDiagram, depth: int) -> "Subdiagram":
        kept = [e for e in self.edges if diagram.has_edge(e) and diagram.level_of(e) <= depth]
        return Subdiagram(self.vertices[:depth + 1], kept)

    def to_dict(self) -> Dict:
        return {
            "W": [sorted(level) for level in self.vertices],
            "F": sorted(self.edges),
        }

    @classmethod
    def from_dict(cls, diagram: BratteliDiagram, data: Dict) -> "Subdiagram":
        if "F" not in data:
            raise DiagramError("Subdiagram record needs an 'F' edge list")
        if "W" not in data:
            return cls.generated_by(diagram, data["F"])
        return cls(data["W"], data["F"])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subdiagram):
            return NotImplemented
        return self.vertices == other.vertices and self.edges == other.edges

    __hash__ = None

    def __repr__(self):
        return f"Subdiagram(levels={len(self.vertices)}, edges={len(self.edges)})"


class ValidationReport:
    """Container for validation results"""

    def __init__(self):
        self.violations: List[str] = []

    @property
    def passed(self) -> bool:
        return not self.violations

    def add(self, message: str):
        self.violations.append(message)

    def get_summary(self) -> str:
        if self.passed:
            return "pass"
        return f"fail | {len(self.violations)} violations | first: {self.violations[0]}"

    def to_dict(self) -> Dict:
        return {"status": "pass" if self.passed else "fail", "violations": list(self.violations)}

    def __repr__(self):
        return f"ValidationReport({self.get_summary()})"


def validate(diagram: BratteliDiagram, sub: Optional[Subdiagram] = None) -> ValidationReport:
    """
    Check the structural invariants of a diagram and an optional subdiagram.

    Args:
        diagram: Diagram to check
        sub: Optional subdiagram (W, F)

    Returns:
        ValidationReport listing every violated invariant with its location
    """
    report = ValidationReport()
    N = diagram.depth
    if N < 0:
        report.add("empty diagram: no levels")
        return report
    if len(diagram.edges) != N:
        report.add(f"edge levels: found {len(diagram.edges)}, expected {N}")
        return report
    if len(diagram.levels[0]) != 1:
        report.add(f"V_0 must be a single source, found {len(diagram.levels[0])} vertices")

    for n, level in enumerate(diagram.levels):
        seen = set()
        for v in level:
            if v in seen:
                report.add(f"duplicate vertex {v} at level {n}")
            seen.add(v)

    seen_ids = set()
    for n, level in enumerate(diagram.edges, start=1):
        sources = set(diagram.levels[n - 1])
        ranges = set(diagram.levels[n])
        for edge in level:
            if edge.id in seen_ids:
                report.add(f"duplicate edge id {edge.id}")
            seen_ids.add(edge.id)
            if edge.source not in sources:
                report.add(f"edge {edge.id} at level {n}: source {edge.source} not in V_{n - 1}")
            if edge.range not in ranges:
                report.add(f"edge {edge.id} at level {n}: range {edge.range} not in V_{n}")

    for n, level in enumerate(diagram.levels):
        for v in level:
            if n >= 1 and not diagram.incoming(n, v):
                report.add(f"no incoming edge: vertex {v} at level {n}")
            if n < N and not diagram.outgoing(n, v):
                report.add(f"no outgoing edge: vertex {v} at level {n}")

    if sub is not None:
        _validate_subdiagram(diagram, sub, report)

    logger.debug("validated %r: %s", diagram, report.get_summary())
    return report


def _validate_subdiagram(diagram: BratteliDiagram, sub: Subdiagram, report: ValidationReport):
    N = diagram.depth
    if len(sub.vertices) != N + 1:
        report.add(f"W has {len(sub.vertices)} levels, expected {N + 1}")
        return
    for n, level in enumerate(sub.vertices):
        known = set(diagram.levels[n])
        for v in sorted(level):
            if v not in known:
                report.add(f"W vertex {v} at level {n} not in V_{n}")
    covered = [set() for _ in range(N + 1)]
    if diagram.levels[0]:
        covered[0].add(diagram.root)
    for edge_id in sorted(sub.edges):
        if not diagram.has_edge(edge_id):
            report.add(f"F edge {edge_id} not in E")
            continue
        n = diagram.level_of(edge_id)
        edge = diagram.edge(edge_id)
        if edge.source not in sub.vertices[n - 1]:
            report.add(f"F edge {edge_id}: source {edge.source} not in W_{n - 1}")
        if edge.range not in sub.vertices[n]:
            report.add(f"F edge {edge_id}: range {edge.range} not in W_{n}")
        covered[n].add(edge.range)
    for n, level in enumerate(sub.vertices):
        for v in sorted(level - covered[n]):
            report.add(f"W not covered: vertex {v} at level {n} is not reached by F")
        for v in sorted(covered[n] - level):
            report.add(f"W not covered: range {v} of F at level {n} missing from W_{n}")
        if n < N:
            for v in sorted(level):
                if not any(e.id in sub.edges for e in diagram.outgoing(n, v)):
                    report.add(f"subdiagram sink: vertex {v} at level {n} has no outgoing F edge")


def iter_paths_between(
    diagram: BratteliDiagram,
    start: int,
    vertex: str,
    end: int,
    allowed: Optional[frozenset] = None
) -> Iterator[Path]:
    """Paths from ``vertex`` at level ``start`` to level ``end``, lexicographically"""
    if start == end:
        yield ()
        return
    for edge in diagram.outgoing(start, vertex):
        if allowed is not None and edge.id not in allowed:
            continue
        for rest in iter_paths_between(diagram, start + 1, edge.range, end, allowed):
            yield (edge.id,) + rest


class PathCountTable:
    """Exact counts |E(v,w)| and |F(v,w)| between two levels"""

    def __init__(self, from_level: int, to_level: int, rows: Sequence[str], cols: Sequence[str],
                 total: np.ndarray, inside: np.ndarray):
        self.from_level = from_level
        self.to_level = to_level
        self.rows = tuple(rows)
        self.cols = tuple(cols)
        self.total = total
        self.inside = inside
        self._row = {v: i for i, v in enumerate(self.rows)}
        self._col = {w: j for j, w in enumerate(self.cols)}

    def count(self, v: str, w: str) -> int:
        return int(self.total[self._row[v], self._col[w]])

    def inside_count(self, v: str, w: str) -> int:
        return int(self.inside[self._row[v], self._col[w]])

    def outside_count(self, v: str, w: str) -> int:
        return self.count(v, w) - self.inside_count(v, w)

    def column_total(self, w: str) -> int:
        return int(sum(self.total[:, self._col[w]]))

    def __repr__(self):
        return f"PathCountTable({self.from_level}->{self.to_level}, {len(self.rows)}x{len(self.cols)})"


def _identity(size: int) -> np.ndarray:
    matrix = np.zeros((size, size), dtype=object)
    for i in range(size):
        matrix[i, i] = 1
    return matrix


def path_counts(diagram: BratteliDiagram, sub: Optional[Subdiagram], n: int, m: int) -> PathCountTable:
    """
    Count paths between levels n < m by multiplying incidence matrices.

    Args:
        diagram: Diagram
        sub: Subdiagram whose F-paths are counted in ``inside`` (None counts nothing)
        n: Start level
        m: End level

    Returns:
        PathCountTable with exact integer entries

    Raises:
        DiagramError: If the level range is invalid
    """
    if not 0 <= n < m <= diagram.depth:
        raise DiagramError(f"Invalid level range {n}..{m} for depth {diagram.depth}")
    total = _identity(len(diagram.levels[n]))
    inside = _identity(len(diagram.levels[n]))
    allowed = sub.edges if sub is not None else frozenset()
    for k in range(n + 1, m + 1):
        total = total.dot(diagram.incidence(k))
        inside = inside.dot(diagram.incidence(k, allowed))
    return PathCountTable(n, m, diagram.levels[n], diagram.levels[m], total, inside)


def max_inside_count(diagram: BratteliDiagram, sub: Subdiagram, n: int) -> int:
    """L_n = max over w in W_n of |F(v0, w)|"""
    if n == 0 or not sub.vertices_at(n):
        return 1 if n == 0 else 0
    table = path_counts(diagram, sub, 0, n)
    return max(table.inside_count(diagram.root, w) for w in sub.vertices_at(n))


class SimplicityReport:
    """Witness levels for full positivity within a horizon"""

    def __init__(self, horizon: int, witnesses: Dict[int, int], failed_level: Optional[int]):
        self.horizon = horizon
        self.witnesses = witnesses
        self.failed_level = failed_level

    @property
    def simple(self) -> bool:
        return self.failed_level is None

    def get_summary(self) -> str:
        if self.simple:
            return f"simple within horizon {self.horizon} | witnesses {self.witnesses}"
        return f"not simple within horizon {self.horizon} | level {self.failed_level} has no witness"

    def __repr__(self):
        return f"SimplicityReport({self.get_summary()})"


def is_simple_at_horizon(diagram: BratteliDiagram, horizon: Optional[int] = None) -> SimplicityReport:
    """
    Look for full-positivity witnesses n < m <= horizon.

    Every level n <= horizon // 2 needs some m <= horizon with |E(v,w)| > 0 for
    all v in V_n and w in V_m; the least such m is recorded as its witness.
    """
    horizon = diagram.depth if horizon is None else horizon
    if not 0 <= horizon <= diagram.depth:
        raise DiagramError(f"Horizon {horizon} outside 0..{diagram.depth}")
    witnesses: Dict[int, int] = {}
    for n in range(0, horizon // 2 + 1):
        if n >= horizon:
            break
        product = _identity(len(diagram.levels[n]))
        found = None
        for m in range(n + 1, horizon + 1):
            product = product.dot(diagram.incidence(m))
            if all(value > 0 for value in product.flat):
                found = m
                break
        if found is None:
            return SimplicityReport(horizon, witnesses, n)
        witnesses[n] = found
    return SimplicityReport(horizon, witnesses, None)


class ThinnessResult:
    """Outcome of a factor-c search: a level m or exhaustion with the best ratio seen"""

    def __init__(self, level: Optional[int], factor: int, start: int, best_ratio: Optional[Fraction]):
        self.level = level
        self.factor = factor
        self.start = start
        self.best_ratio = best_ratio

    @property
    def exhausted(self) -> bool:
        return self.level is None

    def __repr__(self):
        if self.exhausted:
            return f"ThinnessResult(exhausted, factor={self.factor}, best_ratio={self.best_ratio})"
        return f"ThinnessResult(level={self.level}, factor={self.factor})"


def thinness_telescope_search(
    diagram: BratteliDiagram,
    sub: Subdiagram,
    factor: int,
    start: int,
    sources: Optional[Iterable[str]] = None
) -> ThinnessResult:
    """
    Find the least m with factor * |F(v,w)| <= |E(v,w)| for all sources v and w in W_m.

    Args:
        diagram: Diagram
        sub: Subdiagram
        factor: Positive integer c
        start: Level of the source vertices
        sources: Vertices at ``start`` (defaults to W_start)

    Returns:
        ThinnessResult; exhausted when no level up to N qualifies
    """
    if factor < 1:
        raise DiagramError(f"Factor must be positive, got {factor}")
    if not 0 <= start < diagram.depth:
        raise DiagramError(f"Start level {start} outside 0..{diagram.depth - 1}")
    sources = sorted(sub.vertices_at(start) if sources is None else sources)
    known = set(diagram.levels[start])
    for v in sources:
        if v not in known:
            raise DiagramError(f"Source vertex {v} not in V_{start}")

    total = _identity(len(diagram.levels[start]))
    inside = _identity(len(diagram.levels[start]))
    rows = diagram.vertex_index(start)
    best: Optional[Fraction] = None
    for m in range(start + 1, diagram.depth + 1):
        total = total.dot(diagram.incidence(m))
        inside = inside.dot(diagram.incidence(m, sub.edges))
        cols = diagram.vertex_index(m)
        worst = Fraction(0)
        satisfied = True
        for v in sources:
            for w in sub.vertices_at(m):
                e_count = total[rows[v], cols[w]]
                f_count = inside[rows[v], cols[w]]
                if factor * f_count > e_count:
                    satisfied = False
                if e_count:
                    worst = max(worst, Fraction(f_count, e_count))
        if satisfied:
            return ThinnessResult(m, factor, start, worst)
        best = worst if best is None else min(best, worst)
    logger.debug("thinness search factor %d from level %d exhausted (best ratio %s)", factor, start, best)
    return ThinnessResult(None, factor, start, best)


class TelescopePlan:
    """Strictly increasing levels 0 = n(0) < n(1) < ... < n(K)"""

    def __init__(self, levels: Sequence[int]):
        levels = tuple(int(level) for level in levels)
        if not levels or levels[0] != 0:
            raise DiagramError("Telescope plan must start at level 0")
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise DiagramError(f"Telescope plan must be strictly increasing: {list(levels)}")
        self.levels = levels

    @classmethod
    def identity(cls, depth: int) -> "TelescopePlan":
        return cls(range(depth + 1))

    @property
    def length(self) -> int:
        return len(self.levels) - 1

    def is_identity(self, depth: int) -> bool:
        return self.levels == tuple(range(depth + 1))

    def compose(self, inner: "TelescopePlan") -> "TelescopePlan":
        """Plan of telescoping by self, then by ``inner`` (indices into self)"""
        if inner.levels[-1] > self.length:
            raise DiagramError(f"Inner plan reaches level {inner.levels[-1]} beyond {self.length}")
        return TelescopePlan([self.levels[i] for i in inner.levels])

    def to_list(self) -> List[int]:
        return list(self.levels)

    def __getitem__(self, index):
        return self.levels[index]

    def __len__(self):
        return len(self.levels)

    def __iter__(self):
        return iter(self.levels)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TelescopePlan):
            return NotImplemented
        return self.levels == other.levels

    __hash__ = None

    def __repr__(self):
        return f"TelescopePlan({list(self.levels)})"


class PathRecoding:
    """Bijection between old depth-n(K) paths and new depth-K paths"""

    def __init__(self, plan: TelescopePlan, segments: Dict[str, Path]):
        self.plan = plan
        self.segments = segments

    @classmethod
    def identity(cls, diagram: BratteliDiagram) -> "PathRecoding":
        segments = {e.id: (e.id,) for level in diagram.edges for e in level}
        return cls(TelescopePlan.identity(diagram.depth), segments)

    def forward(self, path: Sequence[str]) -> Path:
        """Recode an old path of depth at least n(K); edges beyond n(K) are dropped"""
        levels = self.plan.levels
        if len(path) < levels[-1]:
            raise DiagramError(f"Path of length {len(path)} is shorter than plan end {levels[-1]}")
        return tuple(SEGMENT_JOINER.join(path[a:b]) for a, b in zip(levels, levels[1:]))

    def backward(self, path: Sequence[str]) -> Path:
        result: List[str] = []
        for edge_id in path:
            try:
                result.extend(self.segments[edge_id])
            except KeyError:
                raise DiagramError(f"Edge {edge_id} is not a telescoped edge")
        return tuple(result)

    def compose(self, later: "PathRecoding") -> "PathRecoding":
        """Recoding of telescoping by self and then by ``later``"""
        segments = {
            edge_id: tuple(e for part in parts for e in self.segments[part])
            for edge_id, parts in later.segments.items()
        }
        return PathRecoding(self.plan.compose(later.plan), segments)

    def __repr__(self):
        return f"PathRecoding({self.plan!r})"


class TelescopeResult:
    """Telescoped diagram, its subdiagram and the path recoding"""

    def __init__(self, diagram: BratteliDiagram, sub: Optional[Subdiagram], recoding: PathRecoding):
        self.diagram = diagram
        self.sub = sub
        self.recoding = recoding

    def __iter__(self):
        return iter((self.diagram, self.sub, self.recoding))

    def __repr__(self):
        return f"TelescopeResult({self.diagram!r}, {self.recoding.plan!r})"


def telescope(diagram: BratteliDiagram, plan: TelescopePlan, sub: Optional[Subdiagram] = None) -> TelescopeResult:
    """
    Telescope a diagram to the levels of ``plan``.

    Edges of new level k are the paths from level n(k-1) to n(k), named by
    joining their edge ids with '.'; F-edges are the paths inside F.

    Raises:
        DiagramError: If the plan reaches beyond depth N or edge ids collide
    """
    if plan.levels[-1] > diagram.depth:
        raise DiagramError(f"Plan level {plan.levels[-1]} beyond depth {diagram.depth}")
    new_edges: List[List[Edge]] = []
    segments: Dict[str, Path] = {}
    f_ids: List[str] = []
    for a, b in zip(plan.levels, plan.levels[1:]):
        level_edges = []
        for v in diagram.levels[a]:
            for segment in iter_paths_between(diagram, a, v, b):
                edge_id = SEGMENT_JOINER.join(segment)
                if edge_id in segments:
                    raise DiagramError(f"Telescoped edge ids collide: {edge_id}")
                segments[edge_id] = segment
                level_edges.append(Edge(edge_id, v, diagram.edge(segment[-1]).range))
                if sub is not None and all(e in sub.edges for e in segment):
                    f_ids.append(edge_id)
        new_edges.append(level_edges)
    new_diagram = BratteliDiagram([diagram.levels[n] for n in plan.levels], new_edges)
    new_sub = None
    if sub is not None:
        new_sub = Subdiagram([sub.vertices_at(n) for n in plan.levels], f_ids)
    logger.debug("telescoped %r along %r", diagram, plan)
    return TelescopeResult(new_diagram, new_sub, PathRecoding(plan, segments))


def microscope(diagram: BratteliDiagram, n: int) -> BratteliDiagram:
    """
    Insert an intermediate level between n-1 and n.

    Each edge e of E_n becomes s(e) -> <e> -> r(e) with edges ``e^0`` and ``e^1``.
    """
    if not 1 <= n <= diagram.depth:
        raise DiagramError(f"Microscope level {n} outside 1..{diagram.depth}")
    level_edges = diagram.edges[n - 1]
    middle = [f"<{e.id}>" for e in level_edges]
    lower = [Edge(f"{e.id}^0", e.source, f"<{e.id}>") for e in level_edges]
    upper = [Edge(f"{e.id}^1", f"<{e.id}>", e.range) for e in level_edges]
    levels = list(diagram.levels[:n]) + [middle] + list(diagram.levels[n:])
    edges = list(diagram.edges[:n - 1]) + [lower, upper] + list(diagram.edges[n:])
    return BratteliDiagram(levels, edges)


def counting_telescope(diagram: BratteliDiagram, sub: Subdiagram) -> TelescopePlan:
    """
    Choose telescoping levels satisfying the counting inequality.

    n(1) comes from a factor-2 search from v0, each later n(k) from a factor
    (L_{n(k-1)} + 1) search from W_{n(k-1)}. Exhaustion after n(1) ends the plan
    at the last level found.

    Raises:
        HorizonExhausted: If even n(1) does not exist within depth N
    """
    first = thinness_telescope_search(diagram, sub, 2, 0, [diagram.root])
    if first.exhausted:
        raise HorizonExhausted(
            f"no level satisfies 2|F(v0,w)| <= |E(v0,w)| within depth {diagram.depth}",
            stage="counting_telescope",
            best_ratio=first.best_ratio,
        )
    levels = [0, first.level]
    while levels[-1] < diagram.depth:
        previous = levels[-1]
        bound = max_inside_count(diagram, sub, previous)
        step = thinness_telescope_search(diagram, sub, bound + 1, previous, sorted(sub.vertices_at(previous)))
        if step.exhausted:
            logger.info("counting telescope stops at level %d (factor %d exhausted)", previous, bound + 1)
            break
        levels.append(step.level)
    plan = TelescopePlan(levels)
    logger.info("counting telescope plan %s", plan.to_list())
    return plan


def counting_inequality_violations(diagram: BratteliDiagram, sub: Subdiagram) -> List[Tuple[int, str, int, int]]:
    """
    Levels and vertices where |F(v0,w)| exceeds the non-F edges arriving at w.

    Returns:
        List of (level, vertex, inside paths, outside edges) for each violation
    """
    violations = []
    for n in range(1, diagram.depth + 1):
        table = path_counts(diagram, sub, 0, n)
        for w in sorted(sub.vertices_at(n)):
            outside = sum(1 for e in diagram.incoming(n, w) if e.id not in sub.edges)
            inside = table.inside_count(diagram.root, w)
            if inside > outside:
                violations.append((n, w, inside, outside))
    return violations
