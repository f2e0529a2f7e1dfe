"""In-memory stores: immutable graphs, mutable per-session evidence."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from ..errors import UnknownNode
from ..evidence import EvidenceSet
from ..graph import AttackGraph


@dataclass
class StoredGraph:
    graph_id: str
    name: str
    graph: AttackGraph


class GraphStore:
    """Graphs are immutable once loaded; ids are server-assigned."""

    def __init__(self):
        self._graphs: dict[str, StoredGraph] = {}
        self._lock = threading.Lock()
        self._counter = 0

    def add(self, graph: AttackGraph, name: str | None = None) -> StoredGraph:
        with self._lock:
            self._counter += 1
            graph_id = f"g{self._counter}"
            stored = StoredGraph(graph_id, name or graph_id, graph)
            self._graphs[graph_id] = stored
            return stored

    def get(self, graph_id: str) -> StoredGraph | None:
        return self._graphs.get(graph_id)

    def all(self) -> list[StoredGraph]:
        return [self._graphs[k] for k in sorted(self._graphs, key=lambda g: int(g[1:]))]


@dataclass
class Session:
    session_id: str
    graph_id: str
    evidence: dict[int, bool] = field(default_factory=dict)
    last_result: dict | None = None
    pending: dict[str, dict | None] = field(default_factory=dict)
    running_token: str | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)

    def evidence_set(self, graph: AttackGraph) -> EvidenceSet:
        return EvidenceSet.for_graph(graph, self.evidence)


class SessionStore:
    def __init__(self):
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        self._counter = 0

    def create(self, graph_id: str) -> Session:
        with self._lock:
            self._counter += 1
            session = Session(f"s{self._counter}", graph_id)
            self._sessions[session.session_id] = session
            return session

    def get(self, session_id: str) -> Session | None:
        return self._sessions.get(session_id)

    def delete(self, session_id: str) -> bool:
        with self._lock:
            return self._sessions.pop(session_id, None) is not None


def apply_evidence_patch(
    session: Session, graph: AttackGraph, set_entries: dict[int, bool],
    clear: list[int], clear_all: bool,
) -> None:
    """Declarative update: the final evidence map fully replaces intent."""
    unknown = [k for k in set_entries if k not in graph]
    unknown += [k for k in clear if k not in graph]
    if unknown:
        raise UnknownNode(f"evidence references unknown node ids {sorted(set(unknown))}")
    if clear_all:
        session.evidence = {}
    for key in clear:
        session.evidence.pop(int(key), None)
    for key, value in set_entries.items():
        session.evidence[int(key)] = bool(value)
