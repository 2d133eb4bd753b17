"""Shared fixtures: small diagrams and split runs reused across modules"""
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from core.fixtures import load_fixture, merging, two_chain, two_vertex  # noqa: E402
from core.paths import y_paths  # noqa: E402
from core.splitting import diagonal_sequence, run_splitting, tail_sequence  # noqa: E402


@pytest.fixture
def tv3():
    return two_vertex(3)


@pytest.fixture(scope="session")
def merging_split():
    diagram, sub = merging(6)
    return run_splitting(diagram, sub, diagonal_sequence(y_paths(diagram, sub, 6), 6))


@pytest.fixture(scope="session")
def merging_tail_split():
    diagram, sub = merging(6)
    return run_splitting(diagram, sub, tail_sequence(diagram, sub))


@pytest.fixture(scope="session")
def two_vertex_split():
    diagram, sub = two_vertex(8)
    return run_splitting(diagram, sub, diagonal_sequence(y_paths(diagram, sub, 8), 8))


@pytest.fixture(scope="session")
def two_chain_split():
    diagram, sub = two_chain(6)
    return run_splitting(diagram, sub, tail_sequence(diagram, sub))


@pytest.fixture(scope="session")
def disconnected_split():
    diagram, sub = load_fixture("disconnected", 6)
    return run_splitting(diagram, sub, diagonal_sequence(y_paths(diagram, sub, 6), 6))
