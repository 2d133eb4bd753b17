"""
Bratteli Splitting Toolkit - Path Space
Finite path enumeration, tail relations, partitions and cylinder data
"""
import hashlib
import json
import logging
from typing import Callable, Dict, FrozenSet, Hashable, Iterable, List, Optional, Sequence, Tuple

from .diagram import (
    BratteliDiagram, DiagramError, Path, Subdiagram, iter_paths_between, path_counts
)

logger = logging.getLogger(__name__)

DEFAULT_PATH_CAP = 100_000
PATH_SEPARATOR = "/"


class PathCapExceeded(Exception):
    """Raised when a path universe is beyond desk scale"""
    pass


class PartitionError(Exception):
    """Custom exception for partition and cylinder-function errors"""
    pass


def path_id(path: Sequence[str]) -> str:
    return PATH_SEPARATOR.join(path)


def parse_path_id(text: str) -> Path:
    return tuple(text.split(PATH_SEPARATOR)) if text else ()


def path_count(diagram: BratteliDiagram, depth: int) -> int:
    if depth == 0:
        return 1
    table = path_counts(diagram, None, 0, depth)
    return sum(table.count(diagram.root, w) for w in diagram.levels[depth])


def enumerate_paths(diagram: BratteliDiagram, depth: int, cap: int = DEFAULT_PATH_CAP) -> List[Path]:
    """
    All depth-``depth`` paths from v0 in lexicographic edge order.

    Raises:
        DiagramError: If depth is outside 0..N
        PathCapExceeded: If the number of paths exceeds ``cap``
    """
    if not 0 <= depth <= diagram.depth:
        raise DiagramError(f"Depth {depth} outside 0..{diagram.depth}")
    expected = path_count(diagram, depth)
    if expected > cap:
        raise PathCapExceeded(f"{expected} paths at depth {depth} exceed the cap of {cap}")
    return list(iter_paths_between(diagram, 0, diagram.root, depth))


def y_paths(diagram: BratteliDiagram, sub: Subdiagram, depth: int) -> List[Path]:
    """All depth-``depth`` paths using only F-edges"""
    if not 0 <= depth <= diagram.depth:
        raise DiagramError(f"Depth {depth} outside 0..{diagram.depth}")
    return list(iter_paths_between(diagram, 0, diagram.root, depth, sub.edges))


class UnionFind:
    """Disjoint-set forest over the integers 0..n-1"""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, element: int) -> int:
        root = element
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[element] != root:
            self.parent[element], element = root, self.parent[element]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True


class SubrelationPartition:
    """
    Equivalence relation on a finite universe, stored as one class id per element.

    Class ids are renumbered by first appearance in universe order, so two
    partitions of the same ordered universe are equal iff their label tuples are.
    """

    def __init__(self, universe: Sequence[Hashable], labels: Sequence[Hashable]):
        if len(universe) != len(labels):
            raise PartitionError(f"{len(universe)} elements but {len(labels)} labels")
        self.universe = tuple(universe)
        self._index = {item: i for i, item in enumerate(self.universe)}
        if len(self._index) != len(self.universe):
            raise PartitionError("Universe contains duplicate elements")
        renumber: Dict[Hashable, int] = {}
        self.labels = tuple(renumber.setdefault(label, len(renumber)) for label in labels)
        self.class_count = len(renumber)

    @classmethod
    def from_key(cls, universe: Sequence[Hashable], key: Callable) -> "SubrelationPartition":
        return cls(universe, [key(item) for item in universe])

    @classmethod
    def from_classes(cls, universe: Sequence[Hashable], classes: Iterable[Iterable[Hashable]]) -> "SubrelationPartition":
        """Partition with the listed classes; unlisted elements become singletons"""
        members = set(universe)
        owner: Dict[Hashable, Hashable] = {}
        for i, group in enumerate(classes):
            for item in group:
                if item not in members:
                    raise PartitionError(f"Class member {item!r} is not in the universe")
                if item in owner:
                    raise PartitionError(f"Element {item!r} listed in two classes")
                owner[item] = ("class", i)
        return cls(universe, [owner.get(item, ("single", item)) for item in universe])

    @classmethod
    def diagonal(cls, universe: Sequence[Hashable]) -> "SubrelationPartition":
        return cls(universe, range(len(universe)))

    @classmethod
    def full(cls, universe: Sequence[Hashable]) -> "SubrelationPartition":
        return cls(universe, [0] * len(universe))

    def __len__(self):
        return len(self.universe)

    def __contains__(self, item) -> bool:
        return item in self._index

    def class_id(self, item: Hashable) -> int:
        try:
            return self.labels[self._index[item]]
        except KeyError:
            raise PartitionError(f"{item!r} is not in the universe of this partition")

    def same_class(self, a: Hashable, b: Hashable) -> bool:
        return self.class_id(a) == self.class_id(b)

    def classes(self) -> List[Tuple]:
        groups: List[List] = [[] for _ in range(self.class_count)]
        for item, label in zip(self.universe, self.labels):
            groups[label].append(item)
        return [tuple(group) for group in groups]

    def class_of(self, item: Hashable) -> Tuple:
        label = self.class_id(item)
        return tuple(x for x, l in zip(self.universe, self.labels) if l == label)

    def class_sizes(self) -> List[int]:
        sizes = [0] * self.class_count
        for label in self.labels:
            sizes[label] += 1
        return sizes

    def restrict(self, subset: Iterable[Hashable]) -> "SubrelationPartition":
        """Induced partition on ``subset`` (kept in universe order)"""
        subset = set(subset)
        missing = [item for item in subset if item not in self._index]
        if missing:
            raise PartitionError(f"{len(missing)} elements of the subset are outside the universe")
        kept = [(item, label) for item, label in zip(self.universe, self.labels) if item in subset]
        return SubrelationPartition([item for item, _ in kept], [label for _, label in kept])

    def refine_by(self, func: Callable) -> "SubrelationPartition":
        """Pairs of this relation on which ``func`` also agrees"""
        return SubrelationPartition(
            self.universe, [(label, func(item)) for item, label in zip(self.universe, self.labels)]
        )

    def refines(self, other: "SubrelationPartition") -> bool:
        """True iff every class of self lies inside one class of ``other``"""
        image: Dict[int, int] = {}
        for item, label in zip(self.universe, self.labels):
            if item not in other:
                return False
            target = other.class_id(item)
            if image.setdefault(label, target) != target:
                return False
        return True

    def join(self, other: "SubrelationPartition") -> "SubrelationPartition":
        """Smallest equivalence on this universe containing both relations"""
        forest = UnionFind(len(self.universe))
        first: Dict[int, int] = {}
        for i, label in enumerate(self.labels):
            forest.union(first.setdefault(label, i), i)
        anchor: Dict[int, int] = {}
        for item, label in zip(other.universe, other.labels):
            if item not in self._index:
                raise PartitionError(f"{item!r} is outside the universe of the join")
            i = self._index[item]
            forest.union(anchor.setdefault(label, i), i)
        return SubrelationPartition(self.universe, [forest.find(i) for i in range(len(self.universe))])

    def image(self, mapping: Callable, target_universe: Sequence[Hashable]) -> "SubrelationPartition":
        """
        Push the relation forward along ``mapping`` into ``target_universe``.

        Images of one class are joined; target elements hit by nothing stay singletons.
        """
        index = {item: i for i, item in enumerate(target_universe)}
        forest = UnionFind(len(index))
        anchor: Dict[int, int] = {}
        for item, label in zip(self.universe, self.labels):
            target = mapping(item)
            if target not in index:
                raise PartitionError(f"Image {target!r} is outside the target universe")
            forest.union(anchor.setdefault(label, index[target]), index[target])
        return SubrelationPartition(target_universe, [forest.find(i) for i in range(len(index))])

    def pullback(self, mapping: Callable, source_universe: Sequence[Hashable]) -> "SubrelationPartition":
        """Relation a ~ a' iff mapping(a) ~ mapping(a') here"""
        return SubrelationPartition(source_universe, [self.class_id(mapping(item)) for item in source_universe])

    def mismatch(self, other: "SubrelationPartition") -> Optional[Tuple[Hashable, Hashable]]:
        """A pair related in exactly one of two partitions of the same set, or None"""
        if set(self.universe) != set(other.universe):
            extra = set(self.universe) ^ set(other.universe)
            item = sorted(extra, key=repr)[0]
            return (item, item)
        forward: Dict[int, Tuple[int, Hashable]] = {}
        backward: Dict[int, Tuple[int, Hashable]] = {}
        for item in self.universe:
            mine, theirs = self.class_id(item), other.class_id(item)
            seen = forward.setdefault(mine, (theirs, item))
            if seen[0] != theirs:
                return (seen[1], item)
            seen = backward.setdefault(theirs, (mine, item))
            if seen[0] != mine:
                return (seen[1], item)
        return None

    def __eq__(self, other) -> bool:
        if not isinstance(other, SubrelationPartition):
            return NotImplemented
        return self.mismatch(other) is None

    __hash__ = None

    def to_dict(self, key: Callable = path_id) -> Dict:
        return {
            "universe": [key(item) for item in self.universe],
            "classes": [[key(item) for item in group] for group in self.classes()],
        }

    def digest(self, key: Callable = path_id) -> str:
        payload = json.dumps(self.to_dict(key), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def __repr__(self):
        return f"SubrelationPartition({len(self.universe)} elements, {self.class_count} classes)"


class TailRelation(SubrelationPartition):
    """R_n on depth-N paths: agreement on edges n+1..N and on the endpoint"""

    def __init__(self, universe: Sequence[Path], labels: Sequence[Hashable], n: int, depth: int):
        super().__init__(universe, labels)
        self.n = n
        self.depth = depth

    def __repr__(self):
        return f"TailRelation(n={self.n}, N={self.depth}, {self.class_count} classes)"


def tail_relation(
    diagram: BratteliDiagram,
    n: int,
    depth: Optional[int] = None,
    universe: Optional[Sequence[Path]] = None,
    cap: int = DEFAULT_PATH_CAP
) -> TailRelation:
    """
    Tail relation R_n on depth-N paths.

    Args:
        diagram: Diagram
        n: Index, 0 <= n <= N
        depth: N (defaults to the diagram depth)
        universe: Precomputed depth-N paths (enumerated when omitted)
        cap: Path cap used when enumerating
    """
    N = diagram.depth if depth is None else depth
    if not 0 <= n <= N:
        raise DiagramError(f"Tail index {n} outside 0..{N}")
    if universe is None:
        universe = enumerate_paths(diagram, N, cap)
    labels = [(path[n:], diagram.end_vertex(path)) for path in universe]
    return TailRelation(universe, labels, n, N)


def saturate(relation: SubrelationPartition, subset: Iterable[Hashable]) -> FrozenSet:
    """Union of the classes of ``relation`` meeting ``subset``"""
    hit = {relation.class_id(item) for item in subset if item in relation}
    return frozenset(item for item, label in zip(relation.universe, relation.labels) if label in hit)


def restrict(relation: SubrelationPartition, subset: Iterable[Hashable]) -> SubrelationPartition:
    return relation.restrict(subset)


class CylinderSet:
    """Union of cylinders given by admissible depth-d prefixes"""

    def __init__(self, depth: int, prefixes: Iterable[Sequence[str]]):
        self.depth = depth
        self.prefixes: FrozenSet[Path] = frozenset(tuple(p) for p in prefixes)
        for prefix in self.prefixes:
            if len(prefix) != depth:
                raise PartitionError(f"Prefix {path_id(prefix)} does not have depth {depth}")

    @classmethod
    def y_cylinder(cls, diagram: BratteliDiagram, sub: Subdiagram, k: int) -> "CylinderSet":
        """Y_k: paths whose first k edges lie in F"""
        return cls(k, y_paths(diagram, sub, k))

    def __contains__(self, path: Sequence[str]) -> bool:
        return tuple(path[:self.depth]) in self.prefixes

    def members(self, paths: Iterable[Path]) -> List[Path]:
        return [path for path in paths if path in self]

    def to_dict(self) -> Dict:
        return {"depth": self.depth, "prefixes": sorted(path_id(p) for p in self.prefixes)}

    def __repr__(self):
        return f"CylinderSet(depth={self.depth}, prefixes={len(self.prefixes)})"


class CylinderFunction:
    """Map determined by the depth-d prefix of a path"""

    def __init__(self, depth: int, table: Dict[Path, int]):
        self.depth = depth
        self.table = dict(table)

    @classmethod
    def constant(cls, value: int = 0, depth: int = 0) -> "CylinderFunction":
        if depth != 0:
            raise PartitionError("Constant cylinder functions are stored at depth 0")
        return cls(0, {(): value})

    @classmethod
    def from_values(cls, paths: Sequence[Path], values: Sequence[int],
                    depth: Optional[int] = None) -> "CylinderFunction":
        """
        Tabulate values at a given depth, or at the least consistent depth.

        Raises:
            PartitionError: If the values are not determined by depth-``depth`` prefixes
        """
        if depth is None:
            depth = minimal_cylinder_depth(paths, values)
        table: Dict[Path, int] = {}
        for path, value in zip(paths, values):
            prefix = tuple(path[:depth])
            if table.setdefault(prefix, value) != value:
                raise PartitionError(
                    f"Values disagree on prefix {path_id(prefix)} at depth {depth}: {table[prefix]} vs {value}"
                )
        return cls(depth, table)

    def __call__(self, path: Sequence[str]) -> int:
        try:
            return self.table[tuple(path[:self.depth])]
        except KeyError:
            raise PartitionError(f"Prefix {path_id(path[:self.depth])} outside the domain of this cylinder function")

    def values(self) -> List[int]:
        return sorted(set(self.table.values()))

    def to_dict(self) -> Dict:
        return {"depth": self.depth, "table": {path_id(k): v for k, v in sorted(self.table.items())}}

    @classmethod
    def from_dict(cls, data: Dict) -> "CylinderFunction":
        return cls(int(data["depth"]), {parse_path_id(k): int(v) for k, v in data["table"].items()})

    def __repr__(self):
        return f"CylinderFunction(depth={self.depth}, prefixes={len(self.table)})"


def minimal_cylinder_depth(paths: Sequence[Path], values: Sequence[int]) -> int:
    longest = max((len(p) for p in paths), default=0)
    for depth in range(longest + 1):
        table: Dict[Path, int] = {}
        if all(table.setdefault(tuple(p[:depth]), v) == v for p, v in zip(paths, values)):
            return depth
    raise PartitionError("Values are not a function of the paths")


class LabelMap:
    """Finite label set K, default label and the cylinder function mu"""

    def __init__(self, labels: Tuple[int, ...], function: CylinderFunction):
        self.labels = labels
        self.function = function

    @property
    def default_label(self) -> int:
        return min(self.labels)

    @property
    def depth(self) -> int:
        return self.function.depth

    def relation(self, relation: SubrelationPartition, universe: Sequence[Hashable]) -> SubrelationPartition:
        """{(x, x') in relation : mu(x) = mu(x')} on ``universe``"""
        return relation.restrict(universe).refine_by(self.function)

    def __repr__(self):
        return f"LabelMap(K={list(self.labels)}, depth={self.depth})"


def realize_label_map(relation: SubrelationPartition, sub_relation: SubrelationPartition) -> LabelMap:
    """
    Encode a subrelation S of R as labels: the rank of the S-class inside its R-class.

    Args:
        relation: R, over a universe containing that of S
        sub_relation: S

    Returns:
        LabelMap with S = {(x, x') in R : mu(x) = mu(x')}

    Raises:
        PartitionError: If S is not a subrelation of R
    """
    if not sub_relation.refines(relation):
        raise PartitionError("S is not a subrelation of R")
    rank: Dict[int, int] = {}
    counts: Dict[int, int] = {}
    for item in sub_relation.universe:
        s_class = sub_relation.class_id(item)
        if s_class not in rank:
            r_class = relation.class_id(item)
            rank[s_class] = counts.get(r_class, 0)
            counts[r_class] = rank[s_class] + 1
    values = [rank[sub_relation.class_id(item)] for item in sub_relation.universe]
    function = CylinderFunction.from_values(sub_relation.universe, values)
    labels = tuple(range(max(counts.values(), default=1)))
    return LabelMap(labels, function)


class NestingReport:
    """Raw containment indices n_m and the aligning telescope plan"""

    def __init__(self, indices: List[int], alignment: List[int], assignment: List[int]):
        self.indices = indices
        self.alignment = alignment
        self.assignment = assignment

    def to_dict(self) -> Dict:
        return {"indices": list(self.indices), "alignment": list(self.alignment)}

    def __repr__(self):
        return f"NestingReport(indices={self.indices}, alignment={self.alignment})"


def check_nested(sequence: Sequence[SubrelationPartition], tails: Sequence[SubrelationPartition]) -> NestingReport:
    """
    Verify S_1 <= S_2 <= ... and find the least n_m with S_m inside R_{n_m}|Y.

    ``tails[n]`` is R_n|Y for n = 0..N. The alignment levels are
    n'_m = max(n_m, n'_{m-1} + 1), continued one level at a time with the last S
    until they reach N; ``assignment[k]`` names the S used at aligned level k.

    Raises:
        PartitionError: If the sequence is empty, not nested, or escapes R_N|Y
    """
    if not sequence:
        raise PartitionError("Relation sequence is empty")
    for m, (current, following) in enumerate(zip(sequence, sequence[1:]), start=1):
        if not current.refines(following):
            raise PartitionError(f"S_{m} is not contained in S_{m + 1}")
    indices = []
    for m, relation in enumerate(sequence, start=1):
        found = next((n for n, tail in enumerate(tails) if relation.refines(tail)), None)
        if found is None:
            raise PartitionError(f"S_{m} is not contained in any R_n|Y up to depth {len(tails) - 1}")
        indices.append(found)

    depth = len(tails) - 1
    alignment = [0]
    assignment = [-1]
    for m, n in enumerate(indices):
        level = max(n, alignment[-1] + 1)
        if level > depth:
            break
        alignment.append(level)
        assignment.append(m)
    while alignment[-1] < depth:
        alignment.append(alignment[-1] + 1)
        assignment.append(assignment[-1] if assignment[-1] >= 0 else 0)
    logger.debug("nesting indices %s, alignment %s", indices, alignment)
    return NestingReport(indices, alignment, assignment)
