"""
Bratteli Splitting Toolkit - Label Splitting
Builds the surjections rho_w, the sets U_n and the label maps lambda_n that
split the tail relation R along a thin subdiagram Y
"""
import logging
from typing import Dict, List, Optional, Sequence, Tuple

from .diagram import (
    BratteliDiagram, HorizonExhausted, PathRecoding, Subdiagram, TelescopePlan,
    counting_telescope, iter_paths_between, telescope, validate
)
from .paths import (
    DEFAULT_PATH_CAP, CylinderFunction, CylinderSet, LabelMap, NestingReport,
    PartitionError, Path, SubrelationPartition, TailRelation, check_nested,
    enumerate_paths, path_id, parse_path_id, realize_label_map,
    tail_relation, y_paths
)

logger = logging.getLogger(__name__)

CERTIFICATE_FORMAT = "bratteli-split/1"


class SplittingError(Exception):
    """Custom exception for splitting errors, tagged with the failing stage"""

    def __init__(self, message: str, stage: str = "", witness: Optional[Dict] = None):
        super().__init__(f"[{stage}] {message}" if stage else message)
        self.stage = stage
        self.witness = witness


class SurjectionFamily:
    """Maps rho_w from non-F edges into w onto the F-paths from v0 to w"""

    def __init__(self, maps: Dict[Tuple[int, str], Dict[str, Path]]):
        self.maps = maps
        self._owner = {edge_id: key for key, table in maps.items() for edge_id in table}

    def apply(self, level: int, edge_id: str) -> Path:
        key = self._owner.get(edge_id)
        if key is None or key[0] != level:
            raise SplittingError(f"edge {edge_id} is not in the domain of rho at level {level}", stage="rho")
        return self.maps[key][edge_id]

    def domain(self, level: int, vertex: str) -> Tuple[str, ...]:
        return tuple(self.maps.get((level, vertex), {}))

    def preimage(self, level: int, vertex: str, path: Path) -> Optional[str]:
        """Least edge mapped onto ``path``"""
        for edge_id, image in self.maps.get((level, vertex), {}).items():
            if image == path:
                return edge_id
        return None

    def to_dict(self) -> Dict:
        result: Dict[str, Dict[str, Dict[str, str]]] = {}
        for (level, vertex), table in sorted(self.maps.items()):
            result.setdefault(str(level), {})[vertex] = {e: path_id(p) for e, p in table.items()}
        return result

    @classmethod
    def from_dict(cls, data: Dict) -> "SurjectionFamily":
        maps = {}
        for level, vertices in data.items():
            for vertex, table in vertices.items():
                maps[(int(level), vertex)] = {e: parse_path_id(p) for e, p in sorted(table.items())}
        return cls(maps)

    def __repr__(self):
        return f"SurjectionFamily({len(self.maps)} vertices)"


def build_rho(diagram: BratteliDiagram, sub: Subdiagram) -> SurjectionFamily:
    """
    Build rho_w for every level n >= 1 and w in W_n.

    The i-th non-F edge into w (id order) maps to the (i mod |F(v0,w)|)-th F-path
    from v0 to w (lexicographic order).

    Raises:
        SplittingError: If the counting inequality fails at some (n, w)
    """
    maps: Dict[Tuple[int, str], Dict[str, Path]] = {}
    for n in range(1, diagram.depth + 1):
        by_end: Dict[str, List[Path]] = {}
        for path in iter_paths_between(diagram, 0, diagram.root, n, sub.edges):
            by_end.setdefault(diagram.end_vertex(path), []).append(path)
        for w in sorted(sub.vertices_at(n)):
            domain = [e.id for e in diagram.incoming(n, w) if e.id not in sub.edges]
            codomain = by_end.get(w, [])
            if not codomain:
                raise SplittingError(f"vertex {w} at level {n} has no F-path from the source",
                                     stage="build_rho", witness={"level": n, "vertex": w})
            if len(domain) < len(codomain):
                raise SplittingError(
                    f"counting inequality fails at level {n}, vertex {w}: "
                    f"{len(domain)} edges outside F for {len(codomain)} F-paths",
                    stage="build_rho",
                    witness={"level": n, "vertex": w, "domain": len(domain), "codomain": len(codomain)},
                )
            maps[(n, w)] = {e: codomain[i % len(codomain)] for i, e in enumerate(domain)}
    return SurjectionFamily(maps)


def retract(diagram: BratteliDiagram, sub: Subdiagram, path: Sequence[str], depth: int) -> Path:
    """Keep the maximal F-prefix of ``path`` and continue with the least F-path up to ``depth``"""
    j = 0
    while j < len(path) and j < depth and path[j] in sub.edges:
        j += 1
    result = list(path[:j])
    vertex = diagram.end_vertex(result)
    for level in range(j, depth):
        options = [e for e in diagram.outgoing(level, vertex) if e.id in sub.edges]
        if not options:
            raise SplittingError(f"no F-continuation from {vertex} at level {level}", stage="extend_mu")
        result.append(options[0].id)
        vertex = options[0].range
    return tuple(result)


def extend_mu(diagram: BratteliDiagram, sub: Subdiagram, mu: CylinderFunction, n: int) -> CylinderFunction:
    """
    Extend mu_n from Y to Y_{n+1} through the F-retraction.

    Returns:
        CylinderFunction of depth max(depth(mu), n+1) on all prefixes in Y_{n+1}
    """
    depth = max(mu.depth, n + 1)
    table: Dict[Path, int] = {}
    for head in iter_paths_between(diagram, 0, diagram.root, n + 1, sub.edges):
        end = diagram.end_vertex(head)
        for rest in iter_paths_between(diagram, n + 1, end, depth):
            prefix = head + rest
            table[prefix] = mu(retract(diagram, sub, prefix, depth))
    return CylinderFunction(depth, table)


class SplitContext:
    """
    Everything the splitting construction produces.

    Levels refer to the final telescoped diagram. ``lambdas[0]`` is the constant
    default label and ``rprimes[0]`` the diagonal; levels 1..depth-1 carry U_n,
    lambda_n and R'_n.
    """

    def __init__(self, source_diagram: BratteliDiagram, source_sub: Subdiagram):
        self.source_diagram = source_diagram
        self.source_sub = source_sub
        self.nesting: Optional[NestingReport] = None
        self.alignment_plan: Optional[TelescopePlan] = None
        self.counting_plan: Optional[TelescopePlan] = None
        self.recoding: Optional[PathRecoding] = None
        self.diagram: Optional[BratteliDiagram] = None
        self.sub: Optional[Subdiagram] = None
        self.s_sequence: Dict[int, SubrelationPartition] = {}
        self.universe: List[Path] = []
        self.y_paths: List[Path] = []
        self.tails: List[TailRelation] = []
        self.rho: Optional[SurjectionFamily] = None
        self.label_maps: Dict[int, LabelMap] = {}
        self.extensions: Dict[int, CylinderFunction] = {}
        self.u_sets: Dict[int, CylinderSet] = {}
        self.lambdas: Dict[int, CylinderFunction] = {}
        self.rprimes: Dict[int, SubrelationPartition] = {}

    @property
    def depth(self) -> int:
        return self.diagram.depth

    @property
    def top_level(self) -> int:
        return self.depth - 1

    def default_label(self, n: int) -> int:
        if n == 0:
            return 0
        return self.label_maps[n].default_label

    def get_summary(self) -> str:
        sizes = [self.rprimes[n].class_count for n in sorted(self.rprimes)]
        return (f"depth {self.depth} | {len(self.universe):,} paths | {len(self.y_paths)} Y-paths | "
                f"U depths {[self.u_sets[n].depth for n in sorted(self.u_sets)]} | R' classes {sizes}")

    def to_certificate(self) -> Dict:
        """JSON-ready record sufficient for independent re-verification"""
        levels = []
        for n in range(1, self.depth):
            label_map = self.label_maps[n]
            levels.append({
                "n": n,
                "labels": list(label_map.labels),
                "default_label": label_map.default_label,
                "mu_depth": label_map.depth,
                "extension_depth": self.extensions[n].depth,
                "u_depth": self.u_sets[n].depth,
                "lambda": self.lambdas[n].to_dict(),
                "partition_digest": self.rprimes[n].digest(),
            })
        return {
            "format": CERTIFICATE_FORMAT,
            "depth": self.depth,
            "diagram": self.diagram.to_dict(),
            "subdiagram": self.sub.to_dict(),
            "plans": {
                "alignment": self.alignment_plan.to_list(),
                "counting": self.counting_plan.to_list(),
            },
            "nesting": self.nesting.to_dict(),
            "rho": self.rho.to_dict(),
            "s_sequence": [self.s_sequence[n].to_dict()["classes"] for n in range(1, self.depth + 1)],
            "levels": levels,
        }

    def __repr__(self):
        return f"SplitContext({self.get_summary()})"


def find_Un(context: SplitContext, n: int, max_depth: Optional[int] = None) -> CylinderSet:
    """
    Least k in (n, max_depth] such that U_n = Y_k makes mu~_n well defined on
    groups of U_n sharing an R_{n-1}-class and a lambda_{n-1} value.

    Raises:
        HorizonExhausted: If no such k exists within ``max_depth``
    """
    max_depth = context.depth if max_depth is None else max_depth
    diagram, sub = context.diagram, context.sub
    previous = context.tails[n - 1]
    lam = context.lambdas[n - 1]
    mu = context.extensions[n]
    if n == 1:
        return CylinderSet.y_cylinder(diagram, sub, 2)
    for k in range(n + 1, max_depth + 1):
        groups: Dict[Tuple[int, int], int] = {}
        consistent = True
        for path in context.universe:
            if not all(e in sub.edges for e in path[:k]):
                continue
            key = (previous.class_id(path), lam(path))
            if groups.setdefault(key, mu(path)) != mu(path):
                consistent = False
                break
        if consistent:
            logger.debug("U_%d = Y_%d", n, k)
            return CylinderSet.y_cylinder(diagram, sub, k)
    raise HorizonExhausted(f"no k <= {max_depth} gives a well-defined extension at level {n}", stage="find_Un")


def build_lambda(context: SplitContext, n: int) -> CylinderFunction:
    """
    Label map lambda_n, defined case by case:

    (a) on R_{n-1}[U_n]: mu~_n of a witness in U_n with the same R_{n-1}-class and
        lambda_{n-1} value, or the default label when no witness exists;
    (b) outside R_n[U_n]: the default label;
    (c) on the rest: lambda_n of the rho-rewritten path.

    Raises:
        SplittingError: On witness ambiguity, on a rewrite leaving U_n, or if the
            table is not determined by depth-D prefixes
    """
    diagram = context.diagram
    universe = context.universe
    u_set = context.u_sets[n]
    previous, current = context.tails[n - 1], context.tails[n]
    lam = context.lambdas[n - 1]
    mu = context.extensions[n]
    kappa = context.default_label(n)

    witnesses: Dict[Tuple[int, int], Tuple[int, Path]] = {}
    for path in universe:
        if path not in u_set:
            continue
        key = (previous.class_id(path), lam(path))
        value = mu(path)
        seen = witnesses.setdefault(key, (value, path))
        if seen[0] != value:
            raise SplittingError(
                f"witnesses {path_id(seen[1])} and {path_id(path)} disagree at level {n}",
                stage="build_lambda",
                witness={"paths": [path_id(seen[1]), path_id(path)]},
            )

    members = [path for path in universe if path in u_set]
    near = {previous.class_id(path) for path in members}
    far = {current.class_id(path) for path in members}

    def by_witness(path: Path) -> int:
        found = witnesses.get((previous.class_id(path), lam(path)))
        return kappa if found is None else found[0]

    values = []
    for path in universe:
        if previous.class_id(path) in near:
            values.append(by_witness(path))
        elif current.class_id(path) not in far:
            values.append(kappa)
        else:
            rewritten = context.rho.apply(n, path[n - 1]) + tuple(path[n:])
            if rewritten not in u_set:
                raise SplittingError(f"rho-rewrite of {path_id(path)} leaves U_{n}", stage="build_lambda",
                                     witness={"path": path_id(path), "rewrite": path_id(rewritten)})
            values.append(by_witness(rewritten))

    depth = max(u_set.depth, lam.depth, mu.depth)
    try:
        return CylinderFunction.from_values(universe, values, depth)
    except PartitionError as e:
        raise SplittingError(str(e), stage="build_lambda")


def build_Rprime(context: SplitContext, n: int) -> SubrelationPartition:
    """
    R'_n = {(x, x') in R_n : lambda_n(x) = lambda_n(x')}, checked to contain R'_{n-1}.

    Raises:
        SplittingError: If R'_{n-1} is not contained in R'_n
    """
    relation = context.tails[n].refine_by(context.lambdas[n])
    if n - 1 in context.rprimes and not context.rprimes[n - 1].refines(relation):
        raise SplittingError(f"R'_{n - 1} is not contained in R'_{n}", stage="build_Rprime")
    return relation


def transport_sequence(
    sequence: Dict[int, SubrelationPartition],
    assignment: Sequence[int],
    recoding: PathRecoding,
    target_universe: Sequence[Path]
) -> Dict[int, SubrelationPartition]:
    """Push S-partitions through a telescoping; ``assignment[k]`` picks the source of level k"""
    return {
        k: sequence[assignment[k]].image(recoding.forward, target_universe)
        for k in range(1, len(assignment))
    }


def diagonal_sequence(paths: Sequence[Path], depth: int) -> List[SubrelationPartition]:
    return [SubrelationPartition.diagonal(paths) for _ in range(depth)]


def tail_sequence(diagram: BratteliDiagram, sub: Subdiagram, cap: int = DEFAULT_PATH_CAP) -> List[SubrelationPartition]:
    """S_m = R_m|Y for m = 1..N"""
    ys = y_paths(diagram, sub, diagram.depth)
    return [tail_relation(diagram, m, universe=ys) for m in range(1, diagram.depth + 1)]


def run_splitting(
    diagram: BratteliDiagram,
    sub: Subdiagram,
    s_sequence: Sequence[SubrelationPartition],
    cap: int = DEFAULT_PATH_CAP
) -> SplitContext:
    """
    Run the full splitting pipeline.

    check_nested, aligning telescope, counting telescope, build_rho, then for
    every level n = 1..N_f-1: realize_label_map, extend_mu, find_Un,
    build_lambda and build_Rprime.

    Args:
        diagram: Validated diagram of depth N
        sub: Thin subdiagram (W, F)
        s_sequence: S_1 <= S_2 <= ... on the depth-N Y-paths
        cap: Path cap

    Returns:
        Completed SplitContext

    Raises:
        SplittingError: Stage failures, tagged with the stage
        HorizonExhausted: If a search runs past the truncation depth
    """
    report = validate(diagram, sub)
    if not report.passed:
        raise SplittingError(report.get_summary(), stage="validate")
    N = diagram.depth
    ys = y_paths(diagram, sub, N)
    universe = enumerate_paths(diagram, N, cap)
    tails_y = [tail_relation(diagram, n, universe=universe).restrict(ys) for n in range(N + 1)]
    try:
        nesting = check_nested(s_sequence, tails_y)
    except PartitionError as e:
        raise SplittingError(str(e), stage="check_nested")

    context = SplitContext(diagram, sub)
    context.nesting = nesting
    context.alignment_plan = TelescopePlan(nesting.alignment)
    aligned = telescope(diagram, context.alignment_plan, sub)
    aligned_ys = y_paths(aligned.diagram, aligned.sub, aligned.diagram.depth)
    aligned_s = transport_sequence(dict(enumerate(s_sequence)), nesting.assignment, aligned.recoding, aligned_ys)

    try:
        context.counting_plan = counting_telescope(aligned.diagram, aligned.sub)
    except HorizonExhausted as e:
        e.stage = "counting_telescope"
        raise
    final = telescope(aligned.diagram, context.counting_plan, aligned.sub)
    if final.diagram.depth < 2:
        raise HorizonExhausted(
            f"counting telescope leaves depth {final.diagram.depth}; at least 2 levels are needed",
            stage="counting_telescope",
        )
    context.recoding = aligned.recoding.compose(final.recoding)
    context.diagram, context.sub = final.diagram, final.sub
    context.y_paths = y_paths(final.diagram, final.sub, final.diagram.depth)
    context.s_sequence = transport_sequence(aligned_s, list(context.counting_plan.levels), final.recoding,
                                            context.y_paths)
    context.universe = enumerate_paths(final.diagram, final.diagram.depth, cap)
    context.tails = [tail_relation(final.diagram, n, universe=context.universe)
                     for n in range(final.diagram.depth + 1)]
    context.rho = build_rho(final.diagram, final.sub)
    logger.info("splitting on %r with %d Y-paths", final.diagram, len(context.y_paths))

    context.lambdas[0] = CylinderFunction.constant(0)
    context.rprimes[0] = context.tails[0].refine_by(context.lambdas[0])
    for n in range(1, context.depth):
        try:
            context.label_maps[n] = realize_label_map(context.tails[n].restrict(context.y_paths),
                                                      context.s_sequence[n])
        except PartitionError as e:
            raise SplittingError(str(e), stage="realize_label_map")
        context.extensions[n] = extend_mu(final.diagram, final.sub, context.label_maps[n].function, n)
        context.u_sets[n] = find_Un(context, n)
        context.lambdas[n] = build_lambda(context, n)
        context.rprimes[n] = build_Rprime(context, n)
        logger.debug("level %d: U depth %d, lambda depth %d, %d classes", n, context.u_sets[n].depth,
                     context.lambdas[n].depth, context.rprimes[n].class_count)
    logger.info("splitting complete: %s", context.get_summary())
    return context
