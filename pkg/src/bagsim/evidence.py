"""Observed node states and the ``<id>=<y|n>`` evidence string grammar."""

from __future__ import annotations

from typing import Iterator, Mapping

from .errors import MalformedInput, UnknownNode
from .graph import AttackGraph


class EvidenceSet(Mapping[int, bool]):
    """Immutable map from node id to its observed boolean state.

    Consistency with the graph's deterministic structure is deliberately
    not checked here; impossible evidence surfaces as an inference error.
    """

    def __init__(self, entries: Mapping[int, bool] | None = None):
        self._entries: dict[int, bool] = {}
        for key, value in (entries or {}).items():
            self._entries[int(key)] = bool(value)

    @classmethod
    def for_graph(
        cls, graph: AttackGraph, entries: Mapping[int, bool] | None
    ) -> "EvidenceSet":
        """Build an evidence set whose keys are checked against the graph."""
        ev = cls(entries)
        unknown = [k for k in ev if k not in graph]
        if unknown:
            raise UnknownNode(f"evidence references unknown node ids {sorted(unknown)}")
        return ev

    def __getitem__(self, key: int) -> bool:
        return self._entries[key]

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self._entries))

    def __len__(self) -> int:
        return len(self._entries)

    def __repr__(self) -> str:
        return f"EvidenceSet({self.to_string()!r})"

    def to_string(self) -> str:
        return ",".join(f"{k}={'y' if self._entries[k] else 'n'}" for k in self)


def parse_evidence(text: str, graph: AttackGraph | None = None) -> EvidenceSet:
    """Parse ``"6=y,11=n"``; empty or blank text means no evidence."""
    entries: dict[int, bool] = {}
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        key, sep, value = chunk.partition("=")
        if not sep:
            raise MalformedInput(f"evidence entry {chunk!r} is not <id>=<y|n>")
        try:
            node_id = int(key.strip())
        except ValueError:
            raise MalformedInput(f"evidence node id {key.strip()!r} is not an integer") from None
        value = value.strip().lower()
        if value not in ("y", "n"):
            raise MalformedInput(f"evidence value for node {node_id} must be y or n, got {value!r}")
        if node_id in entries:
            raise MalformedInput(f"evidence node {node_id} given more than once")
        entries[node_id] = value == "y"
    if graph is not None:
        return EvidenceSet.for_graph(graph, entries)
    return EvidenceSet(entries)
