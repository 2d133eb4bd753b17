"""
Bratteli Splitting Toolkit - Absorption
Copies of Y carrying an extension Q, their replica inside an enlarged diagram,
and the shift map that folds R joined with Q back onto R
"""
import logging
from typing import Dict, List, Optional, Sequence, Tuple

from .diagram import (
    BratteliDiagram, Edge, HorizonExhausted, PathRecoding, Subdiagram,
    is_simple_at_horizon, max_inside_count, validate
)
from .paths import (
    DEFAULT_PATH_CAP, Path, SubrelationPartition, enumerate_paths, path_id,
    tail_relation, y_paths
)
from .splitting import SplitContext, run_splitting

logger = logging.getLogger(__name__)

ABSORPTION_FORMAT = "bratteli-absorption/1"
TAIL_SECTOR = "tail"
FINITE_Y_LIMIT = 16
REPLICA_ROOT = "z0"

DEVIATIONS = [
    "tail sector: copies beyond M and the point at infinity are one extra copy of Y with the diagonal relation",
    "frontier rule: h maps copy M into the tail sector",
    "replica levels are the classes of Q~_n, joined by one tower edge per class inclusion",
]

Point = Tuple[int, Path]


class AbsorptionError(Exception):
    """Custom exception for absorption errors"""
    pass


class UnsupportedQ(AbsorptionError):
    """Raised when Q is neither prefix-determined nor given on a small Y"""
    pass


class TransportFailure(AbsorptionError):
    """Raised when a shift identity fails on the constructed data"""
    pass


class QSequence:
    """Nested partitions Q_1 <= Q_2 <= ... of the depth-N Y-paths"""

    def __init__(self, universe: Sequence[Path], partitions: Sequence[SubrelationPartition]):
        if not partitions:
            raise AbsorptionError("Q sequence is empty")
        self.universe = tuple(universe)
        members = set(self.universe)
        for m, partition in enumerate(partitions, start=1):
            if set(partition.universe) != members:
                raise AbsorptionError(f"Q_{m} is not a partition of the Y-paths")
        for m, (current, following) in enumerate(zip(partitions, partitions[1:]), start=1):
            if not current.refines(following):
                raise AbsorptionError(f"Q_{m} is not contained in Q_{m + 1}")
        self.partitions = list(partitions)

    @classmethod
    def from_classes(cls, universe: Sequence[Path], classes: Sequence[Sequence[Sequence[Path]]]) -> "QSequence":
        return cls(universe, [SubrelationPartition.from_classes(universe, groups) for groups in classes])

    @classmethod
    def diagonal(cls, universe: Sequence[Path]) -> "QSequence":
        return cls(universe, [SubrelationPartition.diagonal(universe)])

    @classmethod
    def full(cls, universe: Sequence[Path]) -> "QSequence":
        return cls(universe, [SubrelationPartition.full(universe)])

    @classmethod
    def tails(cls, diagram: BratteliDiagram, sub: Subdiagram) -> "QSequence":
        """Q_n = R_n|Y for n = 1..N-1"""
        ys = y_paths(diagram, sub, diagram.depth)
        return cls(ys, [tail_relation(diagram, n, universe=ys) for n in range(1, max(diagram.depth, 2))])

    @property
    def length(self) -> int:
        return len(self.partitions)

    @property
    def last(self) -> SubrelationPartition:
        return self.partitions[-1]

    def at(self, n: int) -> SubrelationPartition:
        """Q_n, with Q_n = Q_L beyond the length L"""
        if n < 1:
            raise AbsorptionError(f"Q index {n} must be at least 1")
        return self.partitions[min(n, self.length) - 1]

    def truncated(self, length: int) -> "QSequence":
        return QSequence(self.universe, self.partitions[:max(1, length)])

    def is_prefix_determined(self, tails_y: Sequence[SubrelationPartition]) -> bool:
        """True iff every Q_n equals some R_t|Y"""
        return all(any(q.mismatch(t) is None for t in tails_y) for q in self.partitions)

    def to_dict(self) -> List:
        return [partition.to_dict()["classes"] for partition in self.partitions]

    def __repr__(self):
        return f"QSequence({len(self.universe)} Y-paths, length {self.length})"


class CopiesSpace:
    """
    Points (k, y) for sectors k = 1..M plus a tail sector M+1 standing in for the
    copies beyond M and the point at infinity.

    Q~_n relates (k, y) and (k, y') iff k <= min(n, M) and (y, y') is in Q_n.
    """

    def __init__(self, ys: Sequence[Path], q: QSequence, copies: int, depth: int):
        if copies < 0:
            raise AbsorptionError(f"Copy count must be non-negative, got {copies}")
        if copies > depth:
            raise AbsorptionError(f"{copies} copies exceed the {depth} available levels")
        self.ys = list(ys)
        self.q = q
        self.copies = copies
        self.depth = depth
        self.points: List[Point] = [(k, y) for k in range(1, copies + 2) for y in self.ys]

    @property
    def tail_sector(self) -> int:
        return self.copies + 1

    def is_tail(self, point: Point) -> bool:
        return point[0] == self.tail_sector

    def point_id(self, point: Point) -> str:
        k, y = point
        sector = TAIL_SECTOR if self.is_tail(point) else str(k)
        return f"{sector}|{path_id(y)}"

    def tilde_key(self, n: int, point: Point) -> Tuple:
        k, y = point
        if k <= min(n, self.copies):
            return ("copy", k, self.q.at(n).class_id(y))
        return ("point", k, y)

    def tilde(self, n: int) -> SubrelationPartition:
        return SubrelationPartition.from_key(self.points, lambda point: self.tilde_key(n, point))

    def __repr__(self):
        return f"CopiesSpace(M={self.copies}, {len(self.points)} points)"


def build_copies_space(ys: Sequence[Path], q: QSequence, copies: int, depth: int) -> CopiesSpace:
    space = CopiesSpace(ys, q, copies, depth)
    logger.debug("copies space %r", space)
    return space


def build_S(copies: CopiesSpace, tail_y: SubrelationPartition) -> SubrelationPartition:
    """
    S on the copies: same copy k <= M, Q-related and R-related; the tail sector
    carries the diagonal.
    """
    last = copies.q.last

    def key(point: Point) -> Tuple:
        k, y = point
        if k <= copies.copies:
            return ("copy", k, last.class_id(y), tail_y.class_id(y))
        return ("point", k, y)
    return SubrelationPartition.from_key(copies.points, key)


class ReplicaDiagram:
    """Diagram whose depth-N paths are the copies points, with tail classes Q~_n"""

    def __init__(self, diagram: BratteliDiagram, sub: Subdiagram, encoding: Dict[Point, Path]):
        self.diagram = diagram
        self.sub = sub
        self.encoding = encoding
        self.decoding = {path: point for point, path in encoding.items()}

    @property
    def empty(self) -> bool:
        return not self.encoding

    def __repr__(self):
        return f"ReplicaDiagram({self.diagram!r}, {len(self.encoding)} points)"


def build_Z_diagram(copies: CopiesSpace) -> ReplicaDiagram:
    """
    Class-tower replica: V_n holds one vertex per Q~_n class, level 1 has one
    edge per point and level n >= 2 one edge from each Q~_{n-1} class to the
    Q~_n class containing it. R_n on replica paths is then exactly Q~_n.
    """
    depth = copies.depth
    partitions: List[Optional[SubrelationPartition]] = [None] + [copies.tilde(n) for n in range(1, depth + 1)]
    levels = [[REPLICA_ROOT]] + [
        [f"Z{n}:{c}" for c in range(partitions[n].class_count)] for n in range(1, depth + 1)
    ]
    edges: List[List[Edge]] = []
    if depth >= 1:
        edges.append([
            Edge(f"z1:{i}", REPLICA_ROOT, f"Z1:{partitions[1].class_id(point)}")
            for i, point in enumerate(copies.points)
        ])
    for n in range(2, depth + 1):
        lower, upper = partitions[n - 1], partitions[n]
        edges.append([
            Edge(f"z{n}:{c}", f"Z{n - 1}:{c}", f"Z{n}:{upper.class_id(members[0])}")
            for c, members in enumerate(lower.classes())
        ])
    diagram = BratteliDiagram(levels, edges)
    sub = Subdiagram(levels, [e.id for level in edges for e in level])
    encoding = {
        point: (f"z1:{i}",) + tuple(f"z{n}:{partitions[n - 1].class_id(point)}" for n in range(2, depth + 1))
        for i, point in enumerate(copies.points)
    }
    logger.info("replica diagram %r", diagram)
    return ReplicaDiagram(diagram, sub, encoding)


class Embedding:
    """Injective map pi from copies points to paths of the enlarged diagram"""

    def __init__(self, pi: Dict[Point, Path], y_image: Sequence[Path], replica_sub: Subdiagram,
                 base_sub: Subdiagram, copies: Optional[CopiesSpace] = None):
        self.pi = pi
        self.y_image = list(y_image)
        self.replica_sub = replica_sub
        self.base_sub = base_sub
        self.copies = copies
        self.decoding = {path: point for point, path in pi.items()}

    def image(self) -> List[Path]:
        return list(self.pi.values())

    def is_injective(self) -> bool:
        return len(self.decoding) == len(self.pi)

    def to_dict(self) -> Dict[str, str]:
        if self.copies is None:
            return {}
        return {self.copies.point_id(point): path_id(path) for point, path in self.pi.items()}

    def __repr__(self):
        return f"Embedding({len(self.pi)} points, {len(self.y_image)} Y-paths)"


class EmbeddingResult:
    """Enlarged diagram, the embedding and the recoding of base paths"""

    def __init__(self, diagram: BratteliDiagram, embedding: Embedding, recoding: PathRecoding):
        self.diagram = diagram
        self.embedding = embedding
        self.recoding = recoding

    def __iter__(self):
        return iter((self.diagram, self.embedding, self.recoding))


def embed_replica(base: BratteliDiagram, base_sub: Subdiagram, replica: ReplicaDiagram,
                  copies: Optional[CopiesSpace] = None) -> EmbeddingResult:
    """
    Graft a replica onto a simple base diagram.

    Replica edges keep their ids, level-1 edges leave the base root. Each replica
    edge into level n gets L_{n-1} parallel padding edges ``<id>+<t>``; at n >= 2
    the first base vertex of level n-1 feeds every replica vertex and every
    replica vertex of level n-1 returns to the first base vertex of level n.
    The padding makes both the counting and the aligning telescopes the identity.

    Raises:
        HorizonExhausted: If the base is not simple within its depth
        AbsorptionError: On depth mismatch, name collisions or an invalid result
    """
    N = base.depth
    ys = y_paths(base, base_sub, N)
    if replica.empty:
        empty = Subdiagram([[base.root]] + [[] for _ in range(N)], [])
        return EmbeddingResult(base, Embedding({}, ys, empty, base_sub, copies), PathRecoding.identity(base))
    rep = replica.diagram
    if rep.depth != N:
        raise AbsorptionError(f"Replica depth {rep.depth} differs from base depth {N}")
    simplicity = is_simple_at_horizon(base)
    if not simplicity.simple:
        raise HorizonExhausted(f"base diagram is {simplicity.get_summary()}", stage="embed_replica")

    root = base.root
    levels = [[root]]
    for n in range(1, N + 1):
        clash = set(base.levels[n]) & set(rep.levels[n])
        if clash:
            raise AbsorptionError(f"replica vertex names collide with the base at level {n}: {sorted(clash)}")
        levels.append(list(base.levels[n]) + list(rep.levels[n]))

    seen = {e.id for level in base.edges for e in level}
    edges: List[List[Edge]] = []
    for n in range(1, N + 1):
        padding = max_inside_count(rep, replica.sub, n - 1)
        level = list(base.edges[n - 1])
        for e in rep.edges[n - 1]:
            source = root if n == 1 else e.source
            level.append(Edge(e.id, source, e.range))
            level.extend(Edge(f"{e.id}+{t}", source, e.range) for t in range(1, padding + 1))
        if n >= 2:
            feeder = base.levels[n - 1][0]
            level.extend(Edge(f"~feed{n}:{w}", feeder, w) for w in rep.levels[n])
            level.extend(Edge(f"~back{n}:{v}", v, base.levels[n][0]) for v in rep.levels[n - 1])
        for edge in level[len(base.edges[n - 1]):]:
            if edge.id in seen:
                raise AbsorptionError(f"replica edge id collides with the base: {edge.id}")
            seen.add(edge.id)
        edges.append(level)

    enlarged = BratteliDiagram(levels, edges)
    replica_sub = Subdiagram([[root]] + [rep.levels[n] for n in range(1, N + 1)], replica.sub.edges)
    report = validate(enlarged, replica_sub)
    if not report.passed:
        raise AbsorptionError(f"enlarged diagram is invalid: {report.get_summary()}")
    embedding = Embedding(dict(replica.encoding), ys, replica_sub, base_sub, copies)
    logger.info("embedded %r into %r", rep, enlarged)
    return EmbeddingResult(enlarged, embedding, PathRecoding.identity(enlarged))


class ShiftMap:
    """h on the Y-image and the copies 1..M, with the active universe A"""

    def __init__(self, mapping: Dict[Path, Path], active: Sequence[Path]):
        self.mapping = mapping
        self.active = list(active)

    def __call__(self, path: Path) -> Path:
        return self.mapping[path]

    def is_injective(self) -> bool:
        return len(set(self.mapping.values())) == len(self.mapping)

    def to_dict(self) -> Dict[str, str]:
        return {path_id(a): path_id(b) for a, b in sorted(self.mapping.items())}

    def __repr__(self):
        return f"ShiftMap({len(self.mapping)} points, {len(self.active)} active)"


def build_shift(embedding: Embedding, copies: CopiesSpace) -> ShiftMap:
    """h(y) = pi(1, y) and h(pi(k, y)) = pi(k+1, y); copy M moves into the tail sector"""
    pi = embedding.pi
    M = copies.copies
    mapping: Dict[Path, Path] = {}
    for y in copies.ys:
        mapping[y] = pi[(1, y)]
        for k in range(1, M + 1):
            mapping[pi[(k, y)]] = pi[(k + 1, y)]
    active = (list(copies.ys) if M >= 1 else []) + [pi[(k, y)] for k in range(1, M) for y in copies.ys]
    return ShiftMap(mapping, active)


def transport_checks(context: SplitContext, embedding: Embedding, copies: CopiesSpace,
                     shift: ShiftMap) -> Dict[str, bool]:
    """The shift identities on the active universe, as computed by the construction"""
    top = context.top_level
    rprime, tail = context.rprimes[top], context.tails[top]
    active = shift.active
    image = [embedding.pi[point] for point in copies.points]
    q_tilde = copies.tilde(copies.depth).pullback(embedding.decoding.__getitem__, image)
    q_eff = copies.q.last

    joined = SubrelationPartition.diagonal(list(embedding.y_image) + image).join(q_eff).join(q_tilde)
    checks = {
        "transport_rprime": rprime.restrict(active).mismatch(rprime.pullback(shift, active)) is None,
        "transport_q": joined.restrict(active).mismatch(q_tilde.pullback(shift, active)) is None,
        "join_identity": tail.join(q_eff).restrict(active).mismatch(tail.pullback(shift, active)) is None,
    }
    if copies.copies >= 1:
        checks["q_pullback"] = tail.pullback(shift, embedding.y_image).mismatch(q_eff) is None
    return checks


class AbsorptionResult:
    """Everything the absorption construction produces"""

    def __init__(self, context: SplitContext, copies: CopiesSpace, embedding: Embedding, shift: ShiftMap,
                 support: str, checks: Dict[str, bool], base: BratteliDiagram, base_sub: Subdiagram):
        self.context = context
        self.copies = copies
        self.embedding = embedding
        self.shift = shift
        self.support = support
        self.checks = checks
        self.base = base
        self.base_sub = base_sub

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def get_summary(self) -> str:
        verdicts = ", ".join(f"{name} {'pass' if ok else 'fail'}" for name, ok in self.checks.items())
        return f"M={self.copies.copies} | Q {self.support} | {self.context.get_summary()} | {verdicts}"

    def to_certificate(self) -> Dict:
        return {
            "format": ABSORPTION_FORMAT,
            "depth": self.base.depth,
            "copies": self.copies.copies,
            "support": self.support,
            "deviations": list(DEVIATIONS),
            "base": {"diagram": self.base.to_dict(), "subdiagram": self.base_sub.to_dict()},
            "y_image": [path_id(y) for y in self.embedding.y_image],
            "q_sequence": self.copies.q.to_dict(),
            "embedding": self.embedding.to_dict(),
            "shift": self.shift.to_dict(),
            "active": [path_id(path) for path in self.shift.active],
            "transport": {name: "pass" if ok else "fail" for name, ok in self.checks.items()},
            "split": self.context.to_certificate(),
        }

    def __repr__(self):
        return f"AbsorptionResult({self.get_summary()})"


def run_absorption(
    diagram: BratteliDiagram,
    sub: Subdiagram,
    q: QSequence,
    copies: int = 2,
    cap: int = DEFAULT_PATH_CAP,
    finite_y_limit: int = FINITE_Y_LIMIT
) -> AbsorptionResult:
    """
    Run the absorption pipeline.

    build_copies_space, build_Z_diagram, embed_replica, build_S, run_splitting
    on the enlarged diagram with the replica as thin subdiagram, build_shift, and
    the transport identities.

    Args:
        diagram: Simple base diagram of depth N
        sub: (W, F) defining Y
        q: Extension of R|Y; truncated to length N-1
        copies: M, at most N-1
        cap: Path cap
        finite_y_limit: Largest Y accepted with a Q that is not prefix-determined

    Returns:
        AbsorptionResult; ``to_certificate()`` gives the JSON record

    Raises:
        UnsupportedQ: If Q is not prefix-determined and Y is large
        AbsorptionError: On invalid input or a failed transport identity
    """
    report = validate(diagram, sub)
    if not report.passed:
        raise AbsorptionError(f"invalid input: {report.get_summary()}")
    N = diagram.depth
    if N < 2:
        raise AbsorptionError(f"absorption needs depth at least 2, got {N}")
    ys = y_paths(diagram, sub, N)
    if not ys:
        raise AbsorptionError("Y is empty")
    if set(q.universe) != set(ys):
        raise AbsorptionError("Q is not a sequence of partitions of the Y-paths")
    universe = enumerate_paths(diagram, N, cap)
    tails_y = [tail_relation(diagram, t, universe=universe).restrict(ys) for t in range(N + 1)]
    q = q.truncated(N - 1)
    if not tails_y[N - 1].refines(q.last):
        raise AbsorptionError(f"R_{N - 1}|Y is not contained in Q")
    if q.is_prefix_determined(tails_y):
        support = "prefix-determined"
    elif len(ys) <= finite_y_limit:
        support = "finite-Y"
    else:
        raise UnsupportedQ(
            f"Q is not prefix-determined and Y has {len(ys)} paths (limit {finite_y_limit}); "
            "identifying its coding with Y is not supported"
        )
    if copies > N - 1:
        raise AbsorptionError(f"{copies} copies need depth at least {copies + 1}, got {N}")

    space = build_copies_space(ys, q, copies, N)
    replica = build_Z_diagram(space)
    enlarged, embedding, _ = embed_replica(diagram, sub, replica, space)
    s_relation = build_S(space, tails_y[N - 1])
    split_ys = y_paths(enlarged, embedding.replica_sub, N)
    s_sequence = [
        space.tilde(m).refine_by(s_relation.class_id).pullback(embedding.decoding.__getitem__, split_ys)
        for m in range(1, N + 1)
    ]
    context = run_splitting(enlarged, embedding.replica_sub, s_sequence, cap)
    if not context.alignment_plan.is_identity(N) or not context.counting_plan.is_identity(N):
        raise AbsorptionError(
            f"telescoping plans are not the identity: alignment {context.alignment_plan.to_list()}, "
            f"counting {context.counting_plan.to_list()}"
        )
    shift = build_shift(embedding, space)
    checks = transport_checks(context, embedding, space, shift)
    failed = [name for name, ok in checks.items() if not ok]
    if failed:
        raise TransportFailure(f"transport identities fail: {', '.join(failed)}")
    result = AbsorptionResult(context, space, embedding, shift, support, checks, diagram, sub)
    logger.info("absorption complete: %s", result.get_summary())
    return result
