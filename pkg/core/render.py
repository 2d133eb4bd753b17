"""
Bratteli Splitting Toolkit - DOT Rendering
Layered Graphviz output with one rank per level and styled subdiagrams
"""
import logging
import os
from typing import List, Optional, Sequence, Tuple

from .diagram import BratteliDiagram, Subdiagram

logger = logging.getLogger(__name__)

BASE_COLOR = "blue"
REPLICA_COLOR = "red"

HEADER = """digraph bratteli {
  rankdir = TB;
  node  [ shape    = circle
        , fontname = "helvetica"
        , fontsize = "10pt"
        ];
  edge  [ color    = gray41
        , penwidth = 0.75
        , arrowsize = 0.5
        ];
"""


def _node(level: int, vertex: str) -> str:
    return f'"{level}:{vertex}"'


def to_dot(diagram: BratteliDiagram, subdiagrams: Sequence[Tuple[Subdiagram, str]] = (),
           title: Optional[str] = None) -> str:
    """
    Render a diagram as DOT.

    Args:
        diagram: Diagram to draw
        subdiagrams: (subdiagram, colour) pairs; their edges are drawn bold in that colour
        title: Optional graph label

    Returns:
        DOT source with one ``rank = same`` block per level
    """
    lines: List[str] = [HEADER]
    if title:
        lines.append(f'  label = "{title}";')
    for n, level in enumerate(diagram.levels):
        lines.append("  { rank = same;")
        for v in level:
            lines.append(f'    {_node(n, v)} [label = "{v}"];')
        lines.append("  }")
    lines.append("")

    styled = {}
    for sub, color in subdiagrams:
        for edge_id in sub.edges:
            styled.setdefault(edge_id, color)
    for n, level in enumerate(diagram.edges, start=1):
        for edge in level:
            attributes = [f'tooltip = "{edge.id}"']
            color = styled.get(edge.id)
            if color is not None:
                attributes += [f"color = {color}", "penwidth = 2.5", "style = bold"]
            lines.append(f"  {_node(n - 1, edge.source)} -> {_node(n, edge.range)} [{', '.join(attributes)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def save_dot(dot: str, output_path: str):
    directory = os.path.dirname(output_path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(output_path, "w", encoding="utf-8") as handle:
        handle.write(dot)
    logger.info("wrote %s", output_path)
