"""
Set-based evaluation of schema correspondences and inner-metric selection.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Dict, Iterable, Mapping, Sequence, Set, Tuple

from src.datamodel import Dataset, TargetSchema
from src.metrics.evaluation import PRF, macro_average, prf_from_sets

from .label import DEFAULT_LABEL_THRESHOLD, INNER_METRICS, match_labels
from .models import MatchEvaluation, SchemaCorrespondence

GoldPairs = Mapping[str, Set[Tuple[str, str]]]


def gold_pairs(correspondences: Iterable[SchemaCorrespondence]) -> Dict[str, Set[Tuple[str, str]]]:
    """Group mapped (source, target) pairs by dataset."""

    grouped: Dict[str, Set[Tuple[str, str]]] = defaultdict(set)
    for correspondence in correspondences:
        if correspondence.target_attribute is not None:
            grouped[correspondence.dataset].add(
                (correspondence.source_attribute, correspondence.target_attribute)
            )
    return dict(grouped)


def evaluate_correspondences(
    predicted: Iterable[SchemaCorrespondence], gold: GoldPairs
) -> MatchEvaluation:
    """Per-dataset P/R/F1 over the gold datasets and their unweighted macro F1."""

    by_dataset = gold_pairs(predicted)
    per_dataset: Dict[str, PRF] = {
        dataset: prf_from_sets(by_dataset.get(dataset, set()), pairs)
        for dataset, pairs in sorted(gold.items())
    }
    return MatchEvaluation(
        per_dataset=per_dataset,
        macro_f1=macro_average([prf.f1 for prf in per_dataset.values()]),
    )


def select_inner_metric(
    sources: Sequence[Dataset],
    target: TargetSchema,
    gold: GoldPairs,
    threshold: float = DEFAULT_LABEL_THRESHOLD,
) -> str:
    """Inner metric with the best macro F1 against gold; ties keep the default."""

    best_metric = "jaro-winkler"
    best_f1 = -1.0
    for metric in sorted(INNER_METRICS, key=lambda name: name != "jaro-winkler"):
        predicted = [
            correspondence
            for source in sources
            for correspondence in match_labels(source, target, metric, threshold)
        ]
        f1 = evaluate_correspondences(predicted, gold).macro_f1
        if f1 > best_f1:
            best_metric, best_f1 = metric, f1
    return best_metric
