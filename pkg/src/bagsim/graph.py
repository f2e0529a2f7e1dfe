"""Attack graph data model: parsing, validation, CPTs and decomposition.

A graph is a DAG of LEAF, AND and OR nodes.  LEAF nodes carry a prior
probability of being true; AND/OR nodes carry a local probability that
scales the deterministic function of their parents.  ``decompose_to_leaf_
probabilities`` rewrites any graph so that all randomness lives on LEAF
nodes and every internal node is a pure boolean gate.
"""

from __future__ import annotations

import csv
import heapq
import io
import itertools
import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

from .errors import (
    CycleError,
    MalformedInput,
    UnknownNode,
    UnknownNodeKind,
    ValidationError,
)


class NodeKind(str, Enum):
    LEAF = "LEAF"
    AND = "AND"
    OR = "OR"


@dataclass(frozen=True)
class Node:
    """One node: LEAF priors and AND/OR local probabilities both live in
    ``local_prob``."""

    id: int
    kind: NodeKind
    label: str = ""
    local_prob: float = 1.0


@dataclass(frozen=True)
class Violation:
    """One structural invariant violation found by :func:`validate`."""

    code: str
    nodes: tuple[int, ...]
    message: str

    def __str__(self) -> str:
        return self.message


class AttackGraph:
    """Immutable directed graph of typed nodes.

    Construction is permissive (everything except duplicate or negative
    node ids is representable) so that :func:`validate` can report all
    invariant violations of a bad graph instead of refusing to build it.
    """

    __hash__ = None  # mutable-free but compared structurally

    def __init__(
        self,
        nodes: Iterable[Node],
        edges: Iterable[tuple[int, int]] = (),
        goals: Iterable[int] = (),
    ):
        node_map: dict[int, Node] = {}
        for node in nodes:
            if node.id < 0:
                raise MalformedInput(f"node id must be non-negative, got {node.id}")
            if node.id in node_map:
                raise MalformedInput(f"duplicate node id {node.id}")
            node_map[node.id] = node
        self._nodes = dict(sorted(node_map.items()))
        self._edges = tuple((int(s), int(t)) for s, t in edges)
        self._goals = frozenset(int(g) for g in goals)

        parents: dict[int, set[int]] = {i: set() for i in self._nodes}
        children: dict[int, set[int]] = {i: set() for i in self._nodes}
        for src, dst in self._edges:
            if src in self._nodes and dst in self._nodes:
                parents[dst].add(src)
                children[src].add(dst)
        self._parents = {i: tuple(sorted(p)) for i, p in parents.items()}
        self._children = {i: tuple(sorted(c)) for i, c in children.items()}

    @property
    def nodes(self) -> tuple[Node, ...]:
        return tuple(self._nodes.values())

    @property
    def ids(self) -> tuple[int, ...]:
        return tuple(self._nodes)

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return self._edges

    @property
    def goals(self) -> frozenset[int]:
        return self._goals

    @property
    def leaf_ids(self) -> tuple[int, ...]:
        return tuple(i for i, n in self._nodes.items() if n.kind is NodeKind.LEAF)

    def __len__(self) -> int:
        return len(self._nodes)

    def __contains__(self, node_id: int) -> bool:
        return node_id in self._nodes

    def node(self, node_id: int) -> Node:
        try:
            return self._nodes[node_id]
        except KeyError:
            raise UnknownNode(f"no node with id {node_id}") from None

    def parents(self, node_id: int) -> tuple[int, ...]:
        if node_id not in self._nodes:
            raise UnknownNode(f"no node with id {node_id}")
        return self._parents[node_id]

    def children(self, node_id: int) -> tuple[int, ...]:
        if node_id not in self._nodes:
            raise UnknownNode(f"no node with id {node_id}")
        return self._children[node_id]

    @property
    def is_decomposed(self) -> bool:
        """True when every AND/OR node is a pure deterministic gate."""
        return all(
            n.local_prob == 1.0
            for n in self._nodes.values()
            if n.kind is not NodeKind.LEAF
        )

    def with_local_prob(self, node_id: int, prob: float) -> "AttackGraph":
        """Copy of the graph with one node's probability replaced."""
        old = self.node(node_id)
        if not 0.0 <= prob <= 1.0:
            raise MalformedInput(f"probability {prob} outside [0, 1]")
        replaced = Node(old.id, old.kind, old.label, float(prob))
        nodes = [replaced if n.id == node_id else n for n in self.nodes]
        return AttackGraph(nodes, self._edges, self._goals)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AttackGraph):
            return NotImplemented
        return (
            self._nodes == other._nodes
            and sorted(self._edges) == sorted(other._edges)
            and self._goals == other._goals
        )

    def __repr__(self) -> str:
        return f"AttackGraph(nodes={len(self._nodes)}, edges={len(self._edges)})"


def validate(graph: AttackGraph) -> list[Violation]:
    """Report every structural invariant violation; empty list means valid."""
    out: list[Violation] = []
    ids = set(graph.ids)

    for node in graph.nodes:
        p = node.local_prob
        if not (isinstance(p, (int, float)) and math.isfinite(p) and 0.0 <= p <= 1.0):
            out.append(
                Violation(
                    "prob-range",
                    (node.id,),
                    f"node {node.id}: probability {p!r} outside [0, 1]",
                )
            )

    seen: set[tuple[int, int]] = set()
    clean_edges: list[tuple[int, int]] = []
    for src, dst in graph.edges:
        if src not in ids or dst not in ids:
            missing = tuple(sorted({src, dst} - ids))
            out.append(
                Violation(
                    "dangling-edge",
                    missing,
                    f"edge ({src}, {dst}) references unknown node(s) {list(missing)}",
                )
            )
            continue
        if src == dst:
            out.append(
                Violation("self-loop", (src,), f"node {src} has a self-loop")
            )
            continue
        if (src, dst) in seen:
            out.append(
                Violation(
                    "duplicate-edge",
                    (src, dst),
                    f"edge ({src}, {dst}) appears more than once",
                )
            )
            continue
        seen.add((src, dst))
        clean_edges.append((src, dst))

    n_parents = {i: 0 for i in ids}
    for _, dst in clean_edges:
        n_parents[dst] += 1
    for node in graph.nodes:
        if node.kind is NodeKind.LEAF and n_parents[node.id] > 0:
            out.append(
                Violation(
                    "leaf-with-parent",
                    (node.id,),
                    f"LEAF node {node.id} appears as an edge target",
                )
            )
        if node.kind is not NodeKind.LEAF and n_parents[node.id] == 0:
            out.append(
                Violation(
                    "missing-parents",
                    (node.id,),
                    f"{node.kind.value} node {node.id} has no parents",
                )
            )

    unknown_goals = tuple(sorted(set(graph.goals) - ids))
    if unknown_goals:
        out.append(
            Violation(
                "unknown-goal",
                unknown_goals,
                f"goal ids {list(unknown_goals)} do not exist",
            )
        )

    leftover = _kahn_leftover(ids, clean_edges)
    if leftover:
        out.append(
            Violation(
                "cycle",
                tuple(sorted(leftover)),
                f"directed cycle involving nodes {sorted(leftover)}",
            )
        )
    return out


def _kahn_leftover(ids: set[int], edges: list[tuple[int, int]]) -> set[int]:
    """Node ids that cannot be topologically ordered (cycle members and
    their descendants)."""
    indeg = {i: 0 for i in ids}
    children: dict[int, list[int]] = {i: [] for i in ids}
    for src, dst in edges:
        indeg[dst] += 1
        children[src].append(dst)
    ready = [i for i in ids if indeg[i] == 0]
    heapq.heapify(ready)
    removed = 0
    while ready:
        i = heapq.heappop(ready)
        removed += 1
        for c in children[i]:
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(ready, c)
    if removed == len(ids):
        return set()
    return {i for i in ids if indeg[i] > 0}


def topological_order(graph: AttackGraph) -> list[int]:
    """Parents-before-children ordering, ties broken by ascending node id."""
    indeg = {i: 0 for i in graph.ids}
    for node_id in graph.ids:
        for p in graph.parents(node_id):
            indeg[node_id] += 1
    ready = [i for i, d in indeg.items() if d == 0]
    heapq.heapify(ready)
    order: list[int] = []
    while ready:
        i = heapq.heappop(ready)
        order.append(i)
        for c in graph.children(i):
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(ready, c)
    if len(order) != len(graph):
        raise CycleError(set(graph.ids) - set(order))
    return order


@dataclass(frozen=True)
class DerivedCpt:
    """Conditional probability table implied by a node's kind.

    LEAF: unconditionally true with its prior.  AND: true with the local
    probability when every parent is true, otherwise never.  OR: never
    true when every parent is false, otherwise true with the local
    probability.
    """

    node_id: int
    kind: NodeKind
    parent_ids: tuple[int, ...]
    local_prob: float

    def prob_true(self, parent_states: Mapping[int, int] | None = None) -> float:
        """P(node = 1) given a full assignment of its parents."""
        states = parent_states or {}
        if self.kind is NodeKind.LEAF:
            return self.local_prob
        values = [bool(states[p]) for p in self.parent_ids]
        if self.kind is NodeKind.AND:
            return self.local_prob if all(values) else 0.0
        return 0.0 if not any(values) else self.local_prob

    def rows(self) -> dict[tuple[int, ...], float]:
        """Explicit table: parent value tuple (ordered by parent id) -> P(1)."""
        if self.kind is NodeKind.LEAF:
            return {(): self.local_prob}
        if len(self.parent_ids) > 16:
            raise MalformedInput("refusing to enumerate a CPT with >16 parents")
        table = {}
        for combo in itertools.product((0, 1), repeat=len(self.parent_ids)):
            states = dict(zip(self.parent_ids, combo))
            table[combo] = self.prob_true(states)
        return table


def derived_cpt(graph: AttackGraph, node_id: int) -> DerivedCpt:
    node = graph.node(node_id)
    return DerivedCpt(node.id, node.kind, graph.parents(node_id), node.local_prob)


def decompose_to_leaf_probabilities(graph: AttackGraph) -> AttackGraph:
    """Move every internal local probability onto a fresh LEAF node.

    For an AND node with probability q < 1 a fresh chance leaf with prior
    q becomes an extra parent and the node turns deterministic.  For an OR
    node with q < 1, a deterministic copy takes over the original parents
    and the original id becomes a deterministic AND of {copy, chance leaf},
    so edges from the original id keep their meaning.  Already-decomposed
    graphs come back structurally identical.
    """
    violations = validate(graph)
    if violations:
        raise ValidationError(violations)

    nodes = {n.id: n for n in graph.nodes}
    edges = list(graph.edges)
    next_id = max(nodes) + 1 if nodes else 0

    for node_id in sorted(nodes):
        node = nodes[node_id]
        if node.kind is NodeKind.LEAF or node.local_prob >= 1.0:
            continue
        q = node.local_prob
        if node.kind is NodeKind.AND:
            chance = Node(next_id, NodeKind.LEAF, f"chance of {node_id}", q)
            next_id += 1
            nodes[chance.id] = chance
            nodes[node_id] = Node(node_id, NodeKind.AND, node.label, 1.0)
            edges.append((chance.id, node_id))
        else:  # OR
            gate = Node(next_id, NodeKind.OR, f"inputs of {node_id}", 1.0)
            next_id += 1
            chance = Node(next_id, NodeKind.LEAF, f"chance of {node_id}", q)
            next_id += 1
            nodes[gate.id] = gate
            nodes[chance.id] = chance
            edges = [
                (src, gate.id if dst == node_id else dst) for src, dst in edges
            ]
            edges.append((gate.id, node_id))
            edges.append((chance.id, node_id))
            nodes[node_id] = Node(node_id, NodeKind.AND, node.label, 1.0)

    return AttackGraph(nodes.values(), edges, graph.goals)


# ---------------------------------------------------------------------------
# canonical JSON format


def parse_canonical(text: str) -> AttackGraph:
    """Parse the canonical JSON graph document and validate it.

    Schema: ``{"nodes": [{"id", "type", "label", "prob"}...],
    "edges": [[src, dst]...], "goals": [...]}``.  ``prob`` is required for
    LEAF nodes and defaults to 1.0 for AND/OR nodes.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise MalformedInput("top-level JSON value must be an object")
    raw_nodes = doc.get("nodes")
    if not isinstance(raw_nodes, list):
        raise MalformedInput('"nodes" must be a list')

    nodes = []
    for entry in raw_nodes:
        if not isinstance(entry, dict):
            raise MalformedInput("each node must be an object")
        node_id = entry.get("id")
        if not isinstance(node_id, int) or isinstance(node_id, bool) or node_id < 0:
            raise MalformedInput(f"node id must be a non-negative integer, got {node_id!r}")
        kind_str = entry.get("type")
        try:
            kind = NodeKind(kind_str)
        except ValueError:
            raise MalformedInput(
                f"node {node_id}: type must be LEAF, AND or OR, got {kind_str!r}"
            ) from None
        label = entry.get("label", "")
        if not isinstance(label, str):
            raise MalformedInput(f"node {node_id}: label must be a string")
        prob = entry.get("prob")
        if prob is None:
            if kind is NodeKind.LEAF:
                raise MalformedInput(f"LEAF node {node_id} must state a prior probability")
            prob = 1.0
        if isinstance(prob, bool) or not isinstance(prob, (int, float)):
            raise MalformedInput(f"node {node_id}: prob must be a number")
        prob = float(prob)
        if not (math.isfinite(prob) and 0.0 <= prob <= 1.0):
            raise MalformedInput(f"node {node_id}: probability {prob} outside [0, 1]")
        nodes.append(Node(node_id, kind, label, prob))

    edges = []
    for pair in doc.get("edges", []):
        if (
            not isinstance(pair, (list, tuple))
            or len(pair) != 2
            or not all(isinstance(x, int) and not isinstance(x, bool) for x in pair)
        ):
            raise MalformedInput(f"each edge must be a [src, dst] integer pair, got {pair!r}")
        edges.append((pair[0], pair[1]))

    goals = doc.get("goals", [])
    if not isinstance(goals, list) or not all(
        isinstance(g, int) and not isinstance(g, bool) for g in goals
    ):
        raise MalformedInput('"goals" must be a list of integers')

    graph = AttackGraph(nodes, edges, goals)
    violations = validate(graph)
    if violations:
        raise ValidationError(violations)
    return graph


def serialize_canonical(graph: AttackGraph) -> str:
    """Deterministic canonical JSON; round-trips through parse_canonical."""
    doc = {
        "nodes": [
            {"id": n.id, "type": n.kind.value, "label": n.label, "prob": n.local_prob}
            for n in graph.nodes
        ],
        "edges": [list(e) for e in sorted(graph.edges)],
        "goals": sorted(graph.goals),
    }
    return json.dumps(doc, indent=2) + "\n"


# ---------------------------------------------------------------------------
# MulVAL CSV adapter


def parse_mulval_csv(
    vertices_text: str,
    arcs_text: str,
    arc_direction: str = "dst_src",
) -> AttackGraph:
    """Build a graph from MulVAL vertex/arc CSV exports.

    Vertex rows are ``id,"label","kind",metric``; the metric column is
    treated as the node's probability.  Arc rows carry two node ids plus a
    trailing ignored field; ``arc_direction`` names the column order, with
    the common convention ``dst_src`` (first column is the edge target) as
    the default.
    """
    if arc_direction not in ("dst_src", "src_dst"):
        raise MalformedInput(f"arc_direction must be dst_src or src_dst, got {arc_direction!r}")

    nodes = []
    for row in _csv_rows(vertices_text):
        if len(row) != 4:
            raise MalformedInput(f"vertex row must have 4 fields, got {row!r}")
        raw_id, label, kind_str, metric = row
        node_id = _parse_int(raw_id, "vertex id")
        kind_str = kind_str.strip()
        if kind_str not in NodeKind.__members__:
            raise UnknownNodeKind(f"unknown node kind {kind_str!r} for node {node_id}")
        try:
            prob = float(metric)
        except ValueError:
            raise MalformedInput(f"node {node_id}: metric {metric!r} is not a number") from None
        if not (math.isfinite(prob) and 0.0 <= prob <= 1.0):
            raise MalformedInput(f"node {node_id}: metric {prob} outside [0, 1]")
        nodes.append(Node(node_id, NodeKind(kind_str), label, prob))

    edges = []
    for row in _csv_rows(arcs_text):
        if len(row) < 2:
            raise MalformedInput(f"arc row must have at least 2 fields, got {row!r}")
        a = _parse_int(row[0], "arc endpoint")
        b = _parse_int(row[1], "arc endpoint")
        edges.append((b, a) if arc_direction == "dst_src" else (a, b))

    graph = AttackGraph(nodes, edges)
    violations = validate(graph)
    if violations:
        raise ValidationError(violations)
    return graph


def _csv_rows(text: str) -> list[list[str]]:
    reader = csv.reader(io.StringIO(text), skipinitialspace=True)
    return [row for row in reader if row and any(f.strip() for f in row)]


def _parse_int(raw: str, what: str) -> int:
    try:
        return int(raw.strip())
    except ValueError:
        raise MalformedInput(f"{what} {raw!r} is not an integer") from None
