"""
Generate diagram files for manual testing
Writes the fixture zoo and a few seeded random simple diagrams as JSON
"""
import os
import random

from core.fixtures import FIXTURES, random_simple_diagram
from core.loader import save_json

OUTPUT_DIR = "fixtures"

# Relations shipped with each file; the CLI uses them when --relation is absent
RELATIONS = {
    "odometer": ("diagonal", "tail"),
    "two_vertex": ("tail", "tail"),
    "primitive": ("diagonal", "full"),
    "stationary": ("diagonal", "tail"),
    "two_chain": ("tail", "full"),
    "merging": ("diagonal", "tail"),
    "disconnected": ("diagonal", "tail"),
}


def write_diagram(filename: str, name: str, diagram, sub, s_spec: str, q_spec: str):
    """Write one diagram file with its default S and Q"""
    record = {
        "name": name,
        "diagram": diagram.to_dict(),
        "subdiagram": sub.to_dict(),
        "S": s_spec,
        "Q": q_spec,
    }
    save_json(record, filename)
    print(f"Created {filename} (depth {diagram.depth}, {sum(len(level) for level in diagram.edges)} edges)")


if __name__ == '__main__':
    print("Generating diagram fixtures...")
    print("=" * 50)
    os.makedirs(OUTPUT_DIR, exist_ok=True)

    for name, builder in sorted(FIXTURES.items()):
        diagram, sub = builder()
        s_spec, q_spec = RELATIONS[name]
        write_diagram(os.path.join(OUTPUT_DIR, f"{name}.json"), name, diagram, sub, s_spec, q_spec)

    rng = random.Random(42)
    for index in range(3):
        diagram, sub = random_simple_diagram(rng, depth=6)
        write_diagram(os.path.join(OUTPUT_DIR, f"random_{index}.json"), f"random_{index}", diagram, sub,
                      "diagonal", "tail")

    print("=" * 50)
    print("Done! Try:")
    print(f"  python main.py validate {OUTPUT_DIR}/two_vertex.json")
    print(f"  python main.py split {OUTPUT_DIR}/two_vertex.json --pdf")
    print(f"  python main.py absorb {OUTPUT_DIR}/two_chain.json --copies 2")
