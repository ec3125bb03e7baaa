"""
Data fusion: resolvers, validation sets, strategy search and fused output.
"""

from .engine import (
    FUSED_DATASET,
    FusionResult,
    FusionStats,
    ProvenanceRow,
    candidates_for,
    cluster_records,
    fuse,
    fusion_accuracy_by_entity,
    has_conflict,
    save_provenance,
)
from .equality import canonical_text, values_equal
from .resolvers import (
    APPLICABLE_TYPES,
    RESOLVER_DESCRIPTIONS,
    Candidate,
    FusionContext,
    Resolution,
    ResolverName,
    ResolverSpec,
    applicable,
    check_applicable,
    resolve_conflict,
)
from .strategy import (
    FusionStrategy,
    StrategyEvaluator,
    StrategyProvenance,
    StrategySearch,
    alternatives,
    build_strategy,
    evaluate_strategy,
    heuristic_strategy,
    oracle_strategy,
    order_neighbours,
    propose_strategies,
    refine_strategy,
    select_strategy,
)
from .validation import (
    FusionValidationSet,
    ValidationEntry,
    ValidationOrigin,
    conflicting_attributes,
    generate_validation_set,
    load_validation_set,
    save_validation_set,
)

__all__ = [
    "APPLICABLE_TYPES",
    "Candidate",
    "FUSED_DATASET",
    "FusionContext",
    "FusionResult",
    "FusionStats",
    "FusionStrategy",
    "FusionValidationSet",
    "ProvenanceRow",
    "RESOLVER_DESCRIPTIONS",
    "Resolution",
    "ResolverName",
    "ResolverSpec",
    "StrategyEvaluator",
    "StrategyProvenance",
    "StrategySearch",
    "ValidationEntry",
    "ValidationOrigin",
    "alternatives",
    "applicable",
    "build_strategy",
    "candidates_for",
    "canonical_text",
    "check_applicable",
    "cluster_records",
    "conflicting_attributes",
    "evaluate_strategy",
    "fuse",
    "fusion_accuracy_by_entity",
    "generate_validation_set",
    "has_conflict",
    "heuristic_strategy",
    "load_validation_set",
    "oracle_strategy",
    "order_neighbours",
    "propose_strategies",
    "refine_strategy",
    "resolve_conflict",
    "save_provenance",
    "save_validation_set",
    "select_strategy",
    "values_equal",
]
