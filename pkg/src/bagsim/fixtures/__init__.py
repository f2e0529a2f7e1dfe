"""Bundled example graphs.

``enterprise_bag.json`` is the 25-node small-enterprise network graph
used throughout the documentation and tests: an attacker on the internet
working toward code execution on an internal database server (node 1,
the goal) through a web server and workstations.  Leaf priors are this
package's documented choices: connectivity and attacker-location facts
are certain (1.0), the three CVE facts carry 0.8/0.9/0.8, and
user-behaviour events carry 0.5.  The edges around the website-compromise
branch (nodes 14, 15, 16, 19, 21) follow the most natural reading of the
scenario: node 19 is an AND with local probability 0.5 so that visiting
a compromised site requires the compromise plus user behaviour.
"""

from __future__ import annotations

import importlib.resources

from ..graph import AttackGraph, parse_canonical


def enterprise_text() -> str:
    """Raw canonical JSON of the enterprise example graph."""
    ref = importlib.resources.files(__package__).joinpath("enterprise_bag.json")
    return ref.read_text(encoding="utf-8")


def enterprise_graph() -> AttackGraph:
    """Parsed enterprise example graph (25 nodes, 11 leaves, goal node 1)."""
    return parse_canonical(enterprise_text())
