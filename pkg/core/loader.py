"""
Bratteli Splitting Toolkit - Diagram Loader
Supports: JSON diagram files, split/absorption certificates, built-in fixtures
"""
import json
import logging
import os
from typing import Dict, List, Optional, Tuple, Union

from .absorption import AbsorptionError, QSequence
from .diagram import BratteliDiagram, DiagramError, Subdiagram, validate
from .fixtures import load_fixture
from .paths import PartitionError, SubrelationPartition, parse_path_id, path_count, y_paths
from .splitting import diagonal_sequence, tail_sequence

logger = logging.getLogger(__name__)

FIXTURE_PREFIX = "fixture:"
NAMED_RELATIONS = ("diagonal", "tail", "full")


class LoaderError(Exception):
    """Custom exception for loader errors"""
    pass


def load_json(filepath: str) -> Dict:
    """
    Read a JSON document.

    Raises:
        LoaderError: If the file is missing or not valid JSON (with line and column)
    """
    if not os.path.exists(filepath):
        raise LoaderError(f"File not found: {filepath}")
    try:
        with open(filepath, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except json.JSONDecodeError as e:
        raise LoaderError(f"Invalid JSON in {filepath} at line {e.lineno}, column {e.colno}: {e.msg}")
    except Exception as e:
        raise LoaderError(f"Failed to read {filepath}: {str(e)}")


def save_json(data: Dict, filepath: str):
    """Write ``data`` with sorted keys so identical runs give identical bytes"""
    try:
        directory = os.path.dirname(filepath)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(filepath, "w", encoding="utf-8") as handle:
            json.dump(data, handle, sort_keys=True, indent=2)
            handle.write("\n")
    except Exception as e:
        raise LoaderError(f"Failed to write {filepath}: {str(e)}")
    logger.info("wrote %s", filepath)


def load_diagram(source: str, depth: Optional[int] = None, check: bool = True) -> Tuple[BratteliDiagram, Subdiagram, Dict]:
    """
    Load a diagram with its subdiagram from a JSON file or a ``fixture:<name>`` reference.

    Args:
        source: Path to a JSON file, or ``fixture:<name>``
        depth: Optional truncation depth
        check: Raise on structural violations (validate callers pass False)

    Returns:
        Tuple of (diagram, subdiagram, metadata dict). The metadata keeps the raw
        ``S`` and ``Q`` entries of the file, if any.

    Raises:
        LoaderError: If the input cannot be loaded or fails validation
    """
    try:
        if source.startswith(FIXTURE_PREFIX):
            diagram, sub = load_fixture(source[len(FIXTURE_PREFIX):], depth)
            record: Dict = {}
        else:
            record = load_json(source)
            if not isinstance(record, dict) or not ("diagram" in record or "levels" in record):
                raise LoaderError(f"{source}: expected a diagram with 'levels' and 'edges', or a 'diagram' entry")
            # flat documents carry levels and edges at the top
            diagram = BratteliDiagram.from_dict(record.get("diagram", record))
            sub = Subdiagram.from_dict(diagram, record.get("subdiagram", {"F": []}))
            if depth is not None:
                if not 1 <= depth <= diagram.depth:
                    raise LoaderError(f"Depth {depth} outside 1..{diagram.depth}")
                sub = sub.truncate(diagram, depth)
                diagram = diagram.truncate(depth)

        report = validate(diagram, sub)
        if check and not report.passed:
            raise LoaderError(f"{source}: {report.get_summary()}")

        metadata = {
            "source": os.path.basename(source),
            "name": record.get("name", source),
            "depth": diagram.depth,
            "vertex_count": sum(len(level) for level in diagram.levels),
            "edge_count": sum(len(level) for level in diagram.edges),
            "S": record.get("S"),
            "Q": record.get("Q"),
        }
        return diagram, sub, metadata

    except Exception as e:
        if isinstance(e, LoaderError):
            raise
        raise LoaderError(f"Failed to load {source}: {str(e)}")


def _classes(spec: List, label: str) -> List[List[Tuple[str, ...]]]:
    if not isinstance(spec, list) or not all(isinstance(group, list) for group in spec):
        raise LoaderError(f"{label}: expected a list of classes of path ids")
    return [[parse_path_id(str(item)) for item in group] for group in spec]


def parse_relation_sequence(spec: Union[str, List], diagram: BratteliDiagram,
                            sub: Subdiagram) -> List[SubrelationPartition]:
    """
    Build S_1 <= S_2 <= ... on the depth-N Y-paths.

    ``spec`` is one of "diagonal", "tail" (S_m = R_m|Y), "full", or a list whose
    m-th entry lists the classes of S_m as path ids; unlisted paths are singletons.
    """
    ys = y_paths(diagram, sub, diagram.depth)
    try:
        if spec == "diagonal":
            return diagonal_sequence(ys, diagram.depth)
        if spec == "tail":
            return tail_sequence(diagram, sub)
        if spec == "full":
            return [SubrelationPartition.full(ys) for _ in range(diagram.depth)]
        if isinstance(spec, list) and spec:
            return [SubrelationPartition.from_classes(ys, _classes(entry, f"S_{m}"))
                    for m, entry in enumerate(spec, start=1)]
    except PartitionError as e:
        raise LoaderError(f"Invalid relation sequence: {str(e)}")
    raise LoaderError(f"Unknown relation {spec!r}; use one of {', '.join(NAMED_RELATIONS)} or explicit classes")


def parse_q_sequence(spec: Union[str, List], diagram: BratteliDiagram, sub: Subdiagram) -> QSequence:
    """Q sequence from "diagonal", "full", "tail" or explicit class lists"""
    ys = y_paths(diagram, sub, diagram.depth)
    try:
        if spec == "diagonal":
            return QSequence.diagonal(ys)
        if spec == "full":
            return QSequence.full(ys)
        if spec == "tail":
            return QSequence.tails(diagram, sub)
        if isinstance(spec, list) and spec:
            return QSequence.from_classes(ys, [_classes(entry, f"Q_{m}") for m, entry in enumerate(spec, start=1)])
    except (PartitionError, DiagramError, AbsorptionError) as e:
        raise LoaderError(f"Invalid Q sequence: {str(e)}")
    raise LoaderError(f"Unknown Q {spec!r}; use one of {', '.join(NAMED_RELATIONS)} or explicit classes")


def load_certificate(filepath: str) -> Dict:
    certificate = load_json(filepath)
    if not isinstance(certificate, dict) or "format" not in certificate:
        raise LoaderError(f"{filepath} is not a certificate: no 'format' entry")
    return certificate


def get_diagram_info(diagram: BratteliDiagram, sub: Subdiagram) -> str:
    """
    Get formatted string with diagram information.

    Args:
        diagram: Diagram
        sub: Subdiagram

    Returns:
        Formatted info string
    """
    info_lines = [
        f"Depth: {diagram.depth}",
        f"Vertices per level: {[len(level) for level in diagram.levels]}",
        f"Edges: {sum(len(level) for level in diagram.edges):,}",
        f"Paths: {path_count(diagram, diagram.depth):,}",
        f"Y-paths: {len(y_paths(diagram, sub, diagram.depth)):,}",
    ]
    return " | ".join(info_lines)
