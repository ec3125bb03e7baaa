"""
Entity-matching evaluation against a labeled test set.
"""

from __future__ import annotations

from typing import Iterable, Mapping

from src.metrics.evaluation import PRF, prf_from_counts

from .models import Label, PairKey


def evaluate_matching(
    predicted: Iterable[PairKey], gold_test: Mapping[PairKey, Label]
) -> PRF:
    """P/R/F1 over the gold pairs only; gold pairs missing from ``predicted`` are non-matches."""

    predicted_keys = set(predicted) & set(gold_test)
    true_positives = sum(1 for key in predicted_keys if gold_test[key] is Label.MATCH)
    false_positives = len(predicted_keys) - true_positives
    false_negatives = sum(
        1 for key, label in gold_test.items() if label is Label.MATCH and key not in predicted_keys
    )
    return prf_from_counts(true_positives, false_positives, false_negatives)
