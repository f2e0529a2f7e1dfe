"""Bayesian attack graph inference and sensitivity analysis."""

from .errors import (
    BagsimError,
    CycleError,
    DomainError,
    ImpossibleEvidence,
    InvalidSpec,
    MalformedInput,
    NoAcceptedSamples,
    TooManyLeaves,
    TooManyParents,
    UnknownNode,
    UnknownNodeKind,
    ValidationError,
    ZeroNormalization,
    ZeroTotalWeight,
)
from .evidence import EvidenceSet, parse_evidence
from .graph import (
    AttackGraph,
    DerivedCpt,
    Node,
    NodeKind,
    Violation,
    decompose_to_leaf_probabilities,
    derived_cpt,
    parse_canonical,
    parse_mulval_csv,
    serialize_canonical,
    topological_order,
    validate,
)
from .oracle import ExactPosterior, exact_access, exact_conditional, exact_evidence_mass
from .samplers import (
    InferenceResult,
    PosteriorEstimate,
    Sample,
    StopCriterion,
    bs_infer,
    effective_sample_size,
    lw_infer,
    pls_infer,
    run_inference,
    sample_forward,
    stderr_of,
)
from .sensitivity import (
    SensitivityDensity,
    SensitivityEntry,
    sensitivity_density,
    sensitivity_onoff,
    sensitivity_report,
)

__version__ = "0.1.0"

__all__ = [
    "AttackGraph",
    "BagsimError",
    "CycleError",
    "DerivedCpt",
    "DomainError",
    "EvidenceSet",
    "ExactPosterior",
    "ImpossibleEvidence",
    "InferenceResult",
    "InvalidSpec",
    "MalformedInput",
    "Node",
    "NodeKind",
    "NoAcceptedSamples",
    "PosteriorEstimate",
    "Sample",
    "SensitivityDensity",
    "SensitivityEntry",
    "StopCriterion",
    "TooManyLeaves",
    "TooManyParents",
    "UnknownNode",
    "UnknownNodeKind",
    "ValidationError",
    "Violation",
    "ZeroNormalization",
    "ZeroTotalWeight",
    "bs_infer",
    "decompose_to_leaf_probabilities",
    "derived_cpt",
    "effective_sample_size",
    "exact_access",
    "exact_conditional",
    "exact_evidence_mass",
    "lw_infer",
    "parse_canonical",
    "parse_evidence",
    "parse_mulval_csv",
    "pls_infer",
    "run_inference",
    "sample_forward",
    "sensitivity_density",
    "sensitivity_onoff",
    "sensitivity_report",
    "serialize_canonical",
    "stderr_of",
    "topological_order",
    "validate",
]
