"""
Bratteli Splitting Toolkit - Verification Oracle
Brute-force re-verification of splitting and absorption certificates.

Checkers read only the serialized certificate: the diagram, subdiagram and
label tables are parsed and every partition is recomputed from scratch.
"""
import copy
import logging
import random
from fractions import Fraction
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple

from .diagram import SEGMENT_JOINER, BratteliDiagram, DiagramError, HorizonExhausted, Subdiagram, path_counts
from .measures import invariant_weightings, min_source_paths
from .paths import (
    DEFAULT_PATH_CAP, CylinderFunction, CylinderSet, Path, SubrelationPartition,
    enumerate_paths, parse_path_id, path_id, saturate, tail_relation, y_paths
)

logger = logging.getLogger(__name__)

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped"

SPLIT_FORMAT = "bratteli-split/1"
ABSORPTION_FORMAT = "bratteli-absorption/1"
TAIL_SECTOR = "tail"


class OracleError(Exception):
    """Custom exception for malformed certificates"""
    pass


class CheckResult:
    """Verdict of one check: pass, fail with a witness, or skipped with a reason"""

    def __init__(self, name: str, status: str, detail: str = "", witness=None,
                 levels: Sequence[int] = (), skipped_levels: Sequence[int] = ()):
        self.name = name
        self.status = status
        self.detail = detail
        self.witness = witness
        self.levels = list(levels)
        self.skipped_levels = list(skipped_levels)

    @property
    def failed(self) -> bool:
        return self.status == FAIL

    def to_dict(self) -> Dict:
        record = {"name": self.name, "status": self.status, "detail": self.detail}
        if self.witness is not None:
            record["witness"] = self.witness
        if self.levels:
            record["levels"] = self.levels
        if self.skipped_levels:
            record["skipped_levels"] = self.skipped_levels
        return record

    def __repr__(self):
        return f"CheckResult({self.name}: {self.status})"


class OracleReport:
    """Container for a group of checks"""

    def __init__(self, title: str, parameters: Optional[Dict] = None):
        self.title = title
        self.parameters = dict(parameters or {})
        self.results: List[CheckResult] = []

    def add(self, result: CheckResult) -> CheckResult:
        self.results.append(result)
        logger.debug("%s / %s: %s %s", self.title, result.name, result.status, result.detail)
        return result

    def get(self, name: str) -> CheckResult:
        for result in self.results:
            if result.name == name:
                return result
        raise KeyError(name)

    @property
    def passed(self) -> bool:
        return not any(result.failed for result in self.results)

    def failures(self) -> List[CheckResult]:
        return [result for result in self.results if result.failed]

    def get_summary(self) -> str:
        counts = {status: sum(1 for r in self.results if r.status == status) for status in (PASS, FAIL, SKIPPED)}
        return f"{self.title}: {counts[PASS]} pass | {counts[FAIL]} fail | {counts[SKIPPED]} skipped"

    def to_dict(self) -> Dict:
        return {
            "title": self.title,
            "status": PASS if self.passed else FAIL,
            "parameters": self.parameters,
            "checks": [result.to_dict() for result in self.results],
        }

    def __repr__(self):
        return f"OracleReport({self.get_summary()})"


def _pair(a: Path, b: Path) -> List[str]:
    return [path_id(a), path_id(b)]


class CertificateView:
    """Partitions and label data rebuilt from a split certificate"""

    def __init__(self, certificate: Dict, cap: int = DEFAULT_PATH_CAP):
        if certificate.get("format") != SPLIT_FORMAT:
            raise OracleError(f"Not a split certificate: format {certificate.get('format')!r}")
        try:
            self.diagram = BratteliDiagram.from_dict(certificate["diagram"])
            self.sub = Subdiagram.from_dict(self.diagram, certificate["subdiagram"])
            self.depth = int(certificate["depth"])
            entries = {int(entry["n"]): entry for entry in certificate["levels"]}
            s_classes = certificate["s_sequence"]
            rho = certificate["rho"]
            self.source_levels = _source_levels(certificate.get("plans", {}), int(certificate["depth"]))
        except (KeyError, TypeError, ValueError, IndexError, DiagramError) as e:
            raise OracleError(f"Malformed split certificate: {str(e)}")
        if self.depth != self.diagram.depth or self.depth < 2:
            raise OracleError(f"Certificate depth {self.depth} does not match its diagram")
        if len(self.source_levels) != self.depth + 1:
            raise OracleError(f"Plans cover {len(self.source_levels) - 1} levels, certificate has {self.depth}")
        self.top = self.depth - 1
        self.universe = enumerate_paths(self.diagram, self.depth, cap)
        self.ys = y_paths(self.diagram, self.sub, self.depth)
        self.tails = [tail_relation(self.diagram, n, universe=self.universe) for n in range(self.depth + 1)]
        self.lambdas: Dict[int, CylinderFunction] = {0: CylinderFunction.constant(0)}
        self.u_sets: Dict[int, CylinderSet] = {}
        for n in range(1, self.depth):
            if n not in entries:
                raise OracleError(f"Certificate has no data for level {n}")
            self.lambdas[n] = CylinderFunction.from_dict(entries[n]["lambda"])
            self.u_sets[n] = CylinderSet.y_cylinder(self.diagram, self.sub, int(entries[n]["u_depth"]))
        self.u_members = {n: [x for x in self.universe if x in u] for n, u in self.u_sets.items()}
        self.s_sequence = {
            n: SubrelationPartition.from_classes(self.ys, [[parse_path_id(p) for p in group] for group in classes])
            for n, classes in enumerate(s_classes, start=1)
        }
        self.rho: Dict[Tuple[int, str], Dict[str, Path]] = {
            (int(level), vertex): {e: parse_path_id(p) for e, p in sorted(table.items())}
            for level, vertices in rho.items() for vertex, table in vertices.items()
        }
        self.rprimes = {n: self.tails[n].refine_by(self.lambdas[n]) for n in range(self.depth)}

    def with_lambda(self, n: int, function: CylinderFunction) -> "CertificateView":
        """Shallow copy with lambda_n (and R'_n) replaced"""
        view = copy.copy(self)
        view.lambdas = dict(self.lambdas)
        view.rprimes = dict(self.rprimes)
        view.lambdas[n] = function
        view.rprimes[n] = self.tails[n].refine_by(function)
        return view

    @property
    def source_depth(self) -> int:
        return self.source_levels[-1]

    def source_path(self, x: Path) -> Path:
        """The untelescoped edge sequence behind a path"""
        edges: List[str] = []
        for j, edge_id in enumerate(x, start=1):
            span = self.source_levels[j] - self.source_levels[j - 1]
            parts = edge_id.split(SEGMENT_JOINER) if span > 1 else [edge_id]
            if len(parts) != span:
                raise OracleError(f"Edge {edge_id!r} at level {j} does not spell {span} source edges")
            edges.extend(parts)
        return tuple(edges)

    def levels_with_slack(self, slack: int) -> Tuple[List[int], List[int]]:
        checked = [n for n in range(1, self.depth) if n <= self.depth - slack]
        skipped = [n for n in range(1, self.depth) if n > self.depth - slack]
        return checked, skipped


def _source_levels(plans: Dict, depth: int) -> List[int]:
    """Source level of every certificate level: the counting plan read through the alignment plan"""
    alignment = [int(level) for level in plans.get("alignment", range(depth + 1))]
    counting = [int(level) for level in plans.get("counting", range(len(alignment)))]
    return [alignment[level] for level in counting]


def as_view(certificate, cap: int = DEFAULT_PATH_CAP) -> CertificateView:
    if isinstance(certificate, CertificateView):
        return certificate
    if hasattr(certificate, "to_certificate"):
        certificate = certificate.to_certificate()
    return CertificateView(certificate, cap)


def _group(items: Sequence[Path], key: Callable) -> Dict[Hashable, List[Path]]:
    groups: Dict[Hashable, List[Path]] = {}
    for item in items:
        groups.setdefault(key(item), []).append(item)
    return groups


def _split_witness(coarse: SubrelationPartition, value: Callable, items: Sequence[Path]) -> Optional[List[str]]:
    """Two items in one class of ``coarse`` with different values, if any"""
    first: Dict[int, Path] = {}
    for item in items:
        label = coarse.class_id(item)
        seen = first.setdefault(label, item)
        if value(seen) != value(item):
            return _pair(seen, item)
    return None


def _clause_restriction(view: CertificateView, n: int):
    restricted = view.tails[n].restrict(view.ys).refine_by(view.lambdas[n])
    pair = restricted.mismatch(view.s_sequence[n])
    return None if pair is None else _pair(*pair)


def _clause_y_inside_u(view: CertificateView, n: int):
    u_set = view.u_sets[n]
    return next((path_id(y) for y in view.ys if y not in u_set), None)


def _clause_saturation_limit(view: CertificateView, n: int):
    sub = view.sub
    intersection = set(view.universe)
    for m in range(n, view.top + 1):
        saturation = saturate(view.tails[m], view.u_members[m])
        stray = next((x for x in saturation if x[m] not in sub.edges), None)
        if stray is not None:
            return {"level": m, "path": path_id(stray), "reason": "saturation leaves F at the next edge"}
        intersection &= saturation
    target = saturate(view.tails[n], view.ys)
    difference = sorted(intersection ^ target)
    return None if not difference else {"path": path_id(difference[0])}


def _clause_nesting(view: CertificateView, n: int):
    previous, lam_prev, lam = view.tails[n - 1], view.lambdas[n - 1], view.lambdas[n]
    first: Dict[Tuple[int, int], Path] = {}
    for x in view.universe:
        seen = first.setdefault((previous.class_id(x), lam_prev(x)), x)
        if lam(seen) != lam(x):
            return _pair(seen, x)
    return None


def _clause_default_outside(view: CertificateView, n: int):
    saturation = saturate(view.tails[n], view.u_members[n])
    outside = [x for x in view.universe if x not in saturation]
    lam = view.lambdas[n]
    return next((_pair(outside[0], x) for x in outside if lam(x) != lam(outside[0])), None)


_MIXED = object()


def _clause_constant_witness(view: CertificateView, n: int):
    previous, current, lam = view.tails[n - 1], view.tails[n], view.lambdas[n]
    constant: Dict[int, object] = {}
    for x in view.universe:
        label = previous.class_id(x)
        if label not in constant:
            constant[label] = lam(x)
        elif constant[label] != lam(x):
            constant[label] = _MIXED
    members = _group(view.universe, current.class_id)
    for y in view.ys:
        target = lam(y)
        if not any(constant[previous.class_id(x)] == target for x in members[current.class_id(y)]):
            return path_id(y)
    return None


def _clause_counting_bound(view: CertificateView, n: int):
    diagram, current, lam = view.diagram, view.tails[n], view.lambdas[n]
    u_set = view.u_sets[n]
    bound = min_source_paths(diagram, n - 1)
    total: Dict[Tuple[int, int], int] = {}
    inside: Dict[Tuple[int, int], int] = {}
    for x in view.universe:
        key = (current.class_id(x), lam(x))
        total[key] = total.get(key, 0) + 1
        if x in u_set:
            inside[key] = inside.get(key, 0) + 1
    for y in view.u_members[n]:
        key = (current.class_id(y), lam(y))
        if bound * inside[key] > total[key]:
            return {"path": path_id(y), "reason": f"{bound} * {inside[key]} > {total[key]}"}

    fibres = _group(view.universe, lambda x: (x[n - 1], x[n:]))
    source_counts = path_counts(diagram, None, 0, n - 1) if n > 1 else None
    used: Dict[Tuple[str, Path], Path] = {}
    for y in view.u_members[n]:
        w = diagram.edge(y[n - 1]).range
        table = view.rho.get((n, w), {})
        edge = next((e for e, image in table.items() if image == tuple(y[:n])), None)
        if edge is None:
            return {"path": path_id(y), "reason": "no rho preimage for the F-prefix"}
        key = (edge, tuple(y[n:]))
        if key in used:
            return {"paths": _pair(used[key], y), "reason": "witness sets overlap"}
        used[key] = y
        witnesses = fibres.get(key, [])
        source = diagram.edge(edge).source
        expected = 1 if source_counts is None else source_counts.count(diagram.root, source)
        if len(witnesses) != expected:
            return {"path": path_id(y), "reason": f"witness set has {len(witnesses)} paths, expected {expected}"}
        stray = next((x for x in witnesses if not current.same_class(x, y) or lam(x) != lam(y)), None)
        if stray is not None:
            return {"paths": _pair(y, stray), "reason": "witness outside the labelled class"}
    return None


def _clause_y_witness(view: CertificateView, n: int):
    current, lam = view.tails[n], view.lambdas[n]
    values: Dict[int, set] = {}
    for y in view.ys:
        values.setdefault(current.class_id(y), set()).add(lam(y))
    for x in view.universe:
        label = current.class_id(x)
        if label in values and lam(x) not in values[label]:
            return path_id(x)
    return None


LEMMA_CLAUSES = [
    ("clause_1", "lambda_n splits R_n|Y into S_n", _clause_restriction),
    ("clause_2", "Y lies in U_n", _clause_y_inside_u),
    ("clause_3", "intersection of R_m[U_m] equals R_n[Y]", _clause_saturation_limit),
    ("clause_4", "lambda_{n-1} agreement inside R_{n-1} persists", _clause_nesting),
    ("clause_5", "one label outside R_n[U_n]", _clause_default_outside),
    ("clause_6", "every Y-label is constant on some R_{n-1}-class", _clause_constant_witness),
    ("clause_7", "counting bound with disjoint witness sets", _clause_counting_bound),
    ("clause_8", "every point of R_n[Y] has a Y-witness", _clause_y_witness),
]


def check_lemma_clauses(certificate, slack: int = 2, cap: int = DEFAULT_PATH_CAP) -> OracleReport:
    """
    Check the eight label-map clauses on every level 1 <= n <= N - slack.

    Args:
        certificate: Split certificate dict, SplitContext or CertificateView
        slack: Levels below the frontier that are not checked
        cap: Path cap

    Returns:
        OracleReport with one result per clause; levels beyond the slack are
        listed as skipped
    """
    view = as_view(certificate, cap)
    checked, skipped = view.levels_with_slack(slack)
    report = OracleReport("lemma clauses", {"depth": view.depth, "slack": slack})
    for name, description, clause in LEMMA_CLAUSES:
        if not checked:
            report.add(CheckResult(name, SKIPPED, f"{description}: no level within slack {slack}",
                                   skipped_levels=skipped))
            continue
        result = None
        for n in checked:
            witness = clause(view, n)
            if witness is not None:
                result = CheckResult(name, FAIL, f"{description}: fails at level {n}", witness,
                                     levels=checked, skipped_levels=skipped)
                break
        report.add(result or CheckResult(name, PASS, description, levels=checked, skipped_levels=skipped))
    logger.info(report.get_summary())
    return report


def check_main1(certificate, cap: int = DEFAULT_PATH_CAP) -> OracleReport:
    """
    Check the structural conclusions on R': openness, R'|Y = S, saturations of Y,
    and unchanged classes away from R[U].
    """
    view = as_view(certificate, cap)
    levels = list(range(1, view.depth))
    report = OracleReport("splitting conclusions", {"depth": view.depth})

    witness = None
    for n in levels:
        witness = _split_witness(view.rprimes[n - 1], view.rprimes[n].class_id, view.universe)
        if not view.rprimes[n].refines(view.tails[n]):
            witness = {"level": n, "reason": "R'_n is not inside R_n"}
        if witness is not None:
            break
    report.add(CheckResult("openness", FAIL if witness else PASS,
                           "R'_n inside R_n and R'_{n-1} inside R'_n", witness, levels=levels))

    witness = None
    for n in levels:
        pair = view.rprimes[n].restrict(view.ys).mismatch(view.s_sequence[n])
        if pair is not None:
            witness = {"level": n, "paths": _pair(*pair)}
            break
    report.add(CheckResult("restriction", FAIL if witness else PASS, "R'_n|Y equals S_n", witness, levels=levels))

    witness = None
    for n in levels:
        difference = sorted(saturate(view.rprimes[n], view.ys) ^ saturate(view.tails[n], view.ys))
        if difference:
            witness = {"level": n, "path": path_id(difference[0])}
            break
    report.add(CheckResult("saturation", FAIL if witness else PASS, "R'_n[Y] equals R_n[Y]", witness, levels=levels))

    witness = None
    for m in levels:
        saturation = saturate(view.tails[m], view.u_members[m])
        outside = [x for x in view.universe if x not in saturation]
        pair = _split_witness(view.tails[m], view.rprimes[m].class_id, outside)
        if pair is not None:
            witness = {"level": m, "paths": pair}
            break
    report.add(CheckResult("orbits_off_u", FAIL if witness else PASS,
                           "R'_m agrees with R_m off R_m[U_m]", witness, levels=levels))

    report.add(CheckResult("minimality", SKIPPED, "checked by check_minimality_approx"))
    report.add(CheckResult("measures", SKIPPED, "checked by check_measure"))
    logger.info(report.get_summary())
    return report


def _covering_classes(partition: SubrelationPartition, prefix: Callable[[Path], Path],
                      prefixes: set) -> Optional[Tuple]:
    """A class missing some cylinder, or None if all classes meet all"""
    hits: Dict[int, set] = {}
    for x in partition.universe:
        hits.setdefault(partition.class_id(x), set()).add(prefix(x))
    for label, seen in hits.items():
        if seen != prefixes:
            member = next(x for x in partition.universe if partition.class_id(x) == label)
            missing = sorted(prefixes - seen)[0]
            return member, missing
    return None


def check_minimality_approx(certificate, d: int = 2, cap: int = DEFAULT_PATH_CAP) -> OracleReport:
    """
    Finite-resolution minimality: every class of R' at the top level meets every depth-d cylinder.

    Cylinders are taken over the source diagram, so d counts source levels
    and N is the source depth whatever the telescoping did. The covering
    index c is the least certificate level whose R_c-classes all meet every
    cylinder. With top = N_f - 1 the last certificate level, a class of
    R'_top that misses a cylinder is a failure when c <= top - 1 and an
    exhausted horizon otherwise.

    Raises:
        DiagramError: If d is negative
        HorizonExhausted: If d reaches the source depth or the covering index is too deep
    """
    view = as_view(certificate, cap)
    if d < 0:
        raise DiagramError(f"Resolution {d} must not be negative")
    if d >= view.source_depth:
        raise HorizonExhausted(f"resolution {d} needs more than depth {view.source_depth}", stage="minimality")
    report = OracleReport("minimality", {"resolution": d, "depth": view.source_depth})
    if d == 0:
        report.add(CheckResult("minimality", PASS, f"vacuous at resolution (0, {view.source_depth}): one cylinder"))
        return report

    def prefix(x: Path) -> Path:
        return view.source_path(x)[:d]

    prefixes = {prefix(x) for x in view.universe}
    covering = next((n for n in range(view.depth + 1)
                     if _covering_classes(view.tails[n], prefix, prefixes) is None), None)
    if covering is None:
        raise HorizonExhausted(
            f"no covering index at resolution {d} within depth {view.source_depth}", stage="minimality"
        )
    report.parameters["covering_index"] = view.source_levels[covering]
    gap = _covering_classes(view.rprimes[view.top], prefix, prefixes)
    if gap is None:
        report.add(CheckResult("minimality", PASS,
                               f"minimality verified at resolution ({d}, {view.source_depth})"))
    elif covering > view.top - 1:
        raise HorizonExhausted(
            f"covering index {view.source_levels[covering]} at resolution {d} leaves no room "
            f"below level {view.source_levels[view.top]}",
            stage="minimality",
        )
    else:
        member, missing = gap
        report.add(CheckResult("minimality", FAIL, f"an R'_{view.top} class misses a cylinder",
                               {"member": path_id(member), "cylinder": path_id(missing)}))
    logger.info(report.get_summary())
    return report


class GraphMap:
    """Bijection between two path sets whose pairs lie in a relation"""

    def __init__(self, pairs: Dict[Path, Path]):
        self.pairs = pairs

    def is_bijective(self) -> bool:
        return len(set(self.pairs.values())) == len(self.pairs)

    def outside(self, relation: SubrelationPartition) -> Optional[Path]:
        """A source point not related to its image, if any"""
        return next((x for x, y in self.pairs.items() if not relation.same_class(x, y)), None)

    def __len__(self):
        return len(self.pairs)

    def __repr__(self):
        return f"GraphMap({len(self.pairs)} pairs)"


def _graph_maps(view: CertificateView, samples: int, seed: int) -> List[Tuple[int, GraphMap]]:
    rng = random.Random(seed)
    maps = []
    outside_by_level = {}
    for m in range(1, view.depth):
        saturation = saturate(view.tails[m], view.u_members[m])
        outside_by_level[m] = [x for x in view.universe if x not in saturation]
    first = outside_by_level[1]
    if first:
        maps.append((1, GraphMap({x: x for x in first if x[:1] == first[0][:1]})))
    for _ in range(samples):
        m = rng.randint(1, view.depth - 1)
        by_end: Dict[str, List[Path]] = {}
        for prefix in sorted({x[:m] for x in outside_by_level[m]}):
            by_end.setdefault(view.diagram.end_vertex(prefix), []).append(prefix)
        choices = sorted(v for v, prefixes in by_end.items() if len(prefixes) >= 2)
        if not choices:
            continue
        source, target = rng.sample(by_end[rng.choice(choices)], 2)
        pairs = {x: target + x[m:] for x in outside_by_level[m] if x[:m] == source}
        maps.append((m, GraphMap(pairs)))
    return maps


def check_measure(certificate, samples: int = 8, seed: int = 42, cap: int = DEFAULT_PATH_CAP) -> OracleReport:
    """
    Measure mechanism of the splitting: the per-class counting bound, the exact
    bound on mu(U_n) for every extreme invariant weighting, and mass-preserving
    graph maps inside R'_m away from R_m[U_m].
    """
    view = as_view(certificate, cap)
    diagram = view.diagram
    levels = list(range(1, view.depth))
    report = OracleReport("measures", {"depth": view.depth, "samples": samples, "seed": seed})

    witness = None
    for n in levels:
        bound = min_source_paths(diagram, n - 1)
        sizes = view.rprimes[n].class_sizes()
        inside: Dict[int, int] = {}
        for y in view.u_members[n]:
            label = view.rprimes[n].class_id(y)
            inside[label] = inside.get(label, 0) + 1
        for label, count in inside.items():
            if bound * count > sizes[label]:
                witness = {"level": n, "reason": f"{bound} * {count} > {sizes[label]}"}
                break
        if witness:
            break
    report.add(CheckResult("class_bound", FAIL if witness else PASS,
                           "min|E(v0,v)| * |C & U_n| <= |C| for classes C meeting U_n", witness, levels=levels))

    polytope = invariant_weightings(diagram)
    witness = None
    largest: Dict[str, str] = {}
    for n in levels:
        limit = Fraction(1, min_source_paths(diagram, n - 1))
        values = [weighting.measure(diagram, view.u_sets[n]) for weighting in polytope.vertices]
        largest[str(n)] = str(max(values))
        if max(values) > limit:
            witness = {"level": n, "measure": str(max(values)), "bound": str(limit)}
            break
    report.parameters["u_measures"] = largest
    report.add(CheckResult("u_measure", FAIL if witness else PASS,
                           "mu(U_n) <= 1 / min|E(v0,v)| for every extreme weighting", witness, levels=levels))

    witness = None
    maps = _graph_maps(view, samples, seed)
    universe = set(view.universe)
    for m, graph in maps:
        if not graph.is_bijective() or any(y not in universe for y in graph.pairs.values()):
            witness = {"level": m, "reason": "not a bijection onto paths"}
        elif graph.outside(view.tails[m]) is not None:
            witness = {"level": m, "path": path_id(graph.outside(view.tails[m])), "reason": "pair outside R_m"}
        elif graph.outside(view.rprimes[m]) is not None:
            witness = {"level": m, "path": path_id(graph.outside(view.rprimes[m])), "reason": "pair outside R'_m"}
        else:
            for weighting in polytope.vertices:
                if weighting.path_set_mass(diagram, list(graph.pairs)) != \
                        weighting.path_set_mass(diagram, list(graph.pairs.values())):
                    witness = {"level": m, "reason": "mass changes"}
                    break
        if witness:
            break
    report.add(CheckResult("graph_transport", FAIL if witness else PASS,
                           f"{len(maps)} graph maps inside R'_m preserve mass", witness))
    logger.info(report.get_summary())
    return report


class MutationReport:
    """Outcome of flipping sampled lambda-table entries"""

    def __init__(self):
        self.total = 0
        self.unobservable = 0
        self.detected = 0
        self.escaped: List[Dict] = []

    @property
    def observable(self) -> int:
        return self.total - self.unobservable

    @property
    def detection_rate(self) -> Fraction:
        return Fraction(self.detected, self.observable) if self.observable else Fraction(1)

    def to_dict(self) -> Dict:
        return {
            "total": self.total,
            "unobservable": self.unobservable,
            "detected": self.detected,
            "detection_rate": str(self.detection_rate),
            "escaped": self.escaped,
        }

    def __repr__(self):
        return f"MutationReport({self.detected}/{self.observable} detected, {self.unobservable} unobservable)"


def mutation_sweep(certificate, samples: int = 50, seed: int = 42, slack: int = 2,
                   cap: int = DEFAULT_PATH_CAP) -> MutationReport:
    """
    Flip single lambda-table entries and count how many the checkers catch.

    A flip that leaves R'_n unchanged is unobservable and not counted.
    """
    if hasattr(certificate, "to_certificate"):
        certificate = certificate.to_certificate()
    view = as_view(certificate, cap)
    entries = [(int(level["n"]), key, level["labels"])
               for level in certificate["levels"] for key in sorted(level["lambda"]["table"])]
    rng = random.Random(seed)
    report = MutationReport()
    for n, key, labels in rng.sample(entries, min(samples, len(entries))):
        report.total += 1
        original = view.lambdas[n]
        prefix = parse_path_id(key)
        old = original.table[prefix]
        new = next((label for label in sorted(set(labels) | set(original.table.values())) if label != old),
                   old + 1)
        table = dict(original.table)
        table[prefix] = new
        mutated = view.with_lambda(n, CylinderFunction(original.depth, table))
        if mutated.rprimes[n].mismatch(view.rprimes[n]) is None:
            report.unobservable += 1
            continue
        if check_lemma_clauses(mutated, slack).passed and check_main1(mutated).passed:
            report.escaped.append({"level": n, "prefix": key, "label": new})
        else:
            report.detected += 1
    logger.info("mutation sweep: %r", report)
    return report


def _parse_point(text: str) -> Tuple[str, Path]:
    sector, _, rest = text.partition("|")
    return sector, parse_path_id(rest)


def check_absorption(certificate: Dict, cap: int = DEFAULT_PATH_CAP) -> OracleReport:
    """
    Re-run the shift transport identities of an absorption certificate.

    On the active universe A = Y and copies 1..M-1: h carries R' on A onto R'
    on h(A); h carries the join of Q and Q~ onto Q~; the join of R and Q equals
    the pullback of R under h; and h pulls R back to Q on Y.
    """
    if certificate.get("format") != ABSORPTION_FORMAT:
        raise OracleError(f"Not an absorption certificate: format {certificate.get('format')!r}")
    view = as_view(certificate["split"], cap)
    copies = int(certificate["copies"])
    y_image = [parse_path_id(p) for p in certificate["y_image"]]
    q_sequence = [[[parse_path_id(p) for p in group] for group in classes] for classes in certificate["q_sequence"]]
    points = {_parse_point(k): parse_path_id(v) for k, v in certificate["embedding"].items()}
    shift = {parse_path_id(k): parse_path_id(v) for k, v in certificate["shift"].items()}
    top = view.top
    report = OracleReport("absorption", {"copies": copies, "depth": view.depth})

    def pi(sector, y: Path) -> Path:
        return points[(str(sector), y)]

    tail_label = TAIL_SECTOR
    point_of = {path: key for key, path in points.items()}
    image_paths = [points[key] for key in sorted(points, key=lambda k: (k[0] == tail_label, k[0].zfill(6), k[1]))]

    q_parts = [SubrelationPartition.from_classes(y_image, classes) for classes in q_sequence]
    q_eff = q_parts[-1]

    def q_tilde(n: int) -> SubrelationPartition:
        q_n = q_parts[min(n, len(q_parts)) - 1]

        def key(path: Path):
            sector, y = point_of[path]
            if sector != tail_label and int(sector) <= min(n, copies):
                return ("copy", sector, q_n.class_id(y))
            return ("point", path)
        return SubrelationPartition.from_key(image_paths, key)

    injective = len(set(points.values())) == len(points)
    report.add(CheckResult("embedding_injective", PASS if injective else FAIL, "pi is injective"))

    witness = None
    for n in range(1, view.depth + 1):
        pair = view.tails[n].restrict(image_paths).mismatch(q_tilde(n))
        if pair is not None:
            witness = {"level": n, "paths": _pair(*pair)}
            break
    report.add(CheckResult("embedding_transport", FAIL if witness else PASS,
                           "tail classes of pi(Z) equal the classes of Q~_n", witness))

    full = view.tails[view.depth]
    overlap = sorted(saturate(full, image_paths) & saturate(full, y_image))
    report.add(CheckResult("disjointness", FAIL if overlap else PASS, "R_N[pi(Z)] and R_N[Y] are disjoint",
                           path_id(overlap[0]) if overlap else None))

    expected = {}
    for y in y_image:
        expected[y] = pi(1 if copies >= 1 else tail_label, y)
        for k in range(1, copies + 1):
            expected[pi(k, y)] = pi(k + 1 if k < copies else tail_label, y)
    wrong = sorted(x for x in expected if shift.get(x) != expected[x])
    defined = not wrong and len(shift) == len(expected) and len(set(shift.values())) == len(shift)
    report.add(CheckResult("shift_definition", PASS if defined else FAIL,
                           "h(y) = pi(1,y), h(pi(k,y)) = pi(k+1,y), copy M into the tail sector",
                           path_id(wrong[0]) if wrong else None))

    active = list(y_image) if copies >= 1 else []
    active += [pi(k, y) for k in range(1, copies) for y in y_image]
    if not active:
        for name in ("transport_rprime", "transport_q", "join_identity", "q_pullback"):
            report.add(CheckResult(name, PASS, "vacuous: no active copies"))
        logger.info(report.get_summary())
        return report
    missing = [x for x in active if x not in shift]
    if missing:
        report.add(CheckResult("transport_rprime", FAIL, "h undefined on the active universe", path_id(missing[0])))
        return report
    h = shift.__getitem__
    image_of_active = [h(x) for x in active]

    rprime = view.rprimes[top]
    pair = rprime.restrict(active).mismatch(rprime.pullback(h, active))
    report.add(CheckResult("transport_rprime", FAIL if pair else PASS,
                           "h carries R' on A onto R' on h(A)", _pair(*pair) if pair else None))

    everything = list(y_image) + image_paths
    joined = SubrelationPartition.diagonal(everything).join(q_eff).join(q_tilde(view.depth))
    target = q_tilde(view.depth).restrict(set(image_of_active) & set(image_paths))
    pair = joined.restrict(active).mismatch(target.pullback(h, active))
    report.add(CheckResult("transport_q", FAIL if pair else PASS,
                           "h carries Q joined with Q~ onto Q~", _pair(*pair) if pair else None))

    tail = view.tails[top]
    pair = tail.join(q_eff).restrict(active).mismatch(tail.pullback(h, active))
    report.add(CheckResult("join_identity", FAIL if pair else PASS,
                           "R joined with Q equals the h-pullback of R on A", _pair(*pair) if pair else None))

    pair = tail.pullback(h, y_image).mismatch(q_eff)
    report.add(CheckResult("q_pullback", FAIL if pair else PASS,
                           "h pulls R back to Q on Y", _pair(*pair) if pair else None))
    logger.info(report.get_summary())
    return report
