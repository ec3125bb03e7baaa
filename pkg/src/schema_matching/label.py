"""
Label-based matcher: Monge-Elkan over tokenized attribute labels.
"""

from __future__ import annotations

from typing import List

from src.datamodel import Dataset, TargetSchema
from src.matching.similarity import jaro_winkler, levenshtein_similarity, monge_elkan, split_label

from .models import MatcherKind, SchemaCorrespondence, one_to_one

INNER_METRICS = {
    "levenshtein-sim": levenshtein_similarity,
    "jaro-winkler": jaro_winkler,
}

DEFAULT_LABEL_THRESHOLD = 0.8


def label_score(source_label: str, target_label: str, inner_metric: str = "jaro-winkler") -> float:
    """Monge-Elkan with the source label's tokens as the outer sequence."""

    try:
        metric = INNER_METRICS[inner_metric]
    except KeyError as exc:
        raise ValueError(f"unsupported inner metric {inner_metric}") from exc
    return monge_elkan(split_label(source_label), split_label(target_label), metric)


def match_labels(
    source: Dataset,
    target: TargetSchema,
    inner_metric: str = "jaro-winkler",
    threshold: float = DEFAULT_LABEL_THRESHOLD,
) -> List[SchemaCorrespondence]:
    scored = [
        (label_score(column, attribute.name, inner_metric), column, attribute.name)
        for column in source.attribute_names
        for attribute in target.fused_attributes
    ]
    return [
        SchemaCorrespondence(
            dataset=source.name,
            source_attribute=column,
            target_attribute=attribute,
            score=min(1.0, score),
            matcher=MatcherKind.LABEL,
        )
        for score, column, attribute in one_to_one(scored, threshold)
    ]
