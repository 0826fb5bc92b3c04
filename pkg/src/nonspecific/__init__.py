"""Partitioning and specifying nonspecific evidence in Dempster-Shafer theory."""

from .assignment import assign_events, project_events
from .core import (
    Evidence,
    EvidenceStore,
    Frame,
    MassFunction,
    Proposition,
    belief,
    combine,
    conflict,
    discount,
    entropy,
    intersect,
    plausibility,
)
from .discounting import falsity_discount, subset_credibilities, subset_discount
from .metaconflict import (
    ConflictProfile,
    DomainPrior,
    Partition,
    brute_force_minimize,
    domain_conflict,
    metaconflict,
    minimize,
    subset_conflict,
)
from .pipeline import (
    AnalysisReport,
    RunConfig,
    emit_report,
    load_evidence,
    load_inputs,
    run_overconfident,
    run_refined,
)
from .specifier import conflict_variations, meta_evidence, specify, specify_all

__all__ = [
    "AnalysisReport",
    "assign_events",
    "belief",
    "brute_force_minimize",
    "combine",
    "conflict",
    "conflict_variations",
    "ConflictProfile",
    "discount",
    "domain_conflict",
    "DomainPrior",
    "emit_report",
    "entropy",
    "Evidence",
    "EvidenceStore",
    "falsity_discount",
    "Frame",
    "intersect",
    "load_evidence",
    "load_inputs",
    "MassFunction",
    "meta_evidence",
    "metaconflict",
    "minimize",
    "Partition",
    "plausibility",
    "project_events",
    "Proposition",
    "run_overconfident",
    "run_refined",
    "RunConfig",
    "specify",
    "specify_all",
    "subset_conflict",
    "subset_credibilities",
    "subset_discount",
]

__version__ = "0.1.0"
