"""
Schema matching: label-, instance- and oracle-based matchers into the target schema.
"""

from .evaluation import evaluate_correspondences, gold_pairs, select_inner_metric
from .instance import column_document, match_instances
from .io import (
    load_correspondences,
    project_to_target,
    renames_for,
    save_correspondences,
    shared_target_attributes,
)
from .label import label_score, match_labels
from .llm import (
    column_summary,
    match_all_with_oracle,
    match_with_oracle,
    most_complete_rows,
    render_grid,
    schema_match_request,
)
from .models import MatchEvaluation, MatcherKind, SchemaCorrespondence, one_to_one

__all__ = [
    "MatchEvaluation",
    "MatcherKind",
    "SchemaCorrespondence",
    "column_document",
    "column_summary",
    "evaluate_correspondences",
    "gold_pairs",
    "label_score",
    "load_correspondences",
    "match_all_with_oracle",
    "match_instances",
    "match_labels",
    "match_with_oracle",
    "most_complete_rows",
    "one_to_one",
    "project_to_target",
    "render_grid",
    "renames_for",
    "save_correspondences",
    "schema_match_request",
    "select_inner_metric",
    "shared_target_attributes",
]
