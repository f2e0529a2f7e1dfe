from __future__ import annotations

import pytest

from bagsim.fixtures import enterprise_graph, enterprise_text
from bagsim.graph import AttackGraph, Node, NodeKind, decompose_to_leaf_probabilities


@pytest.fixture
def two_leaf_or() -> AttackGraph:
    """Two 0.5 leaves into an OR gate with local probability 0.8."""
    return AttackGraph(
        [
            Node(0, NodeKind.LEAF, "A", 0.5),
            Node(1, NodeKind.LEAF, "B", 0.5),
            Node(2, NodeKind.OR, "C", 0.8),
        ],
        [(0, 2), (1, 2)],
        goals=[2],
    )


@pytest.fixture
def two_leaf_or_decomposed(two_leaf_or) -> AttackGraph:
    return decompose_to_leaf_probabilities(two_leaf_or)


@pytest.fixture(scope="session")
def enterprise() -> AttackGraph:
    return enterprise_graph()


@pytest.fixture
def enterprise_file(tmp_path):
    path = tmp_path / "enterprise.json"
    path.write_text(enterprise_text(), encoding="utf-8")
    return path
