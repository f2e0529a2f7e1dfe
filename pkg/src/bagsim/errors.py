"""Exception hierarchy shared by all bagsim modules."""

from __future__ import annotations


class BagsimError(Exception):
    """Base class for all errors raised by this package."""


class MalformedInput(BagsimError):
    """Input document (JSON, CSV, evidence string) cannot be interpreted."""


class UnknownNodeKind(MalformedInput):
    """A node kind other than LEAF, AND or OR was supplied."""


class ValidationError(BagsimError):
    """A graph violates one or more structural invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"invalid graph: {lines}")


class CycleError(BagsimError):
    """The graph contains a directed cycle."""

    def __init__(self, nodes):
        self.nodes = tuple(sorted(nodes))
        super().__init__(f"graph contains a cycle involving nodes {list(self.nodes)}")


class UnknownNode(BagsimError):
    """A node id does not exist in the target graph."""


class TooManyLeaves(BagsimError):
    """Exact enumeration was requested beyond the configurable leaf cap."""


class TooManyParents(BagsimError):
    """Backward simulation would enumerate too many parent configurations."""


class ImpossibleEvidence(BagsimError):
    """The evidence set has zero probability mass under the graph."""


class NoAcceptedSamples(BagsimError):
    """Rejection sampling accepted no samples within the sample budget."""


class ZeroTotalWeight(BagsimError):
    """Every importance weight was zero within the sample budget."""


class ZeroNormalization(BagsimError):
    """A backward-sampling normalization constant is identically zero."""


class DomainError(BagsimError, ValueError):
    """A numeric argument is outside its mathematical domain."""


class InvalidSpec(BagsimError):
    """A synthetic graph or benchmark specification is unusable."""
