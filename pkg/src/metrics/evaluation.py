"""
Precision / recall / F1 arithmetic and rounding shared by the evaluators.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Hashable, Iterable, Sequence, Set


def round_half_up(value: float, digits: int = 1) -> float:
    """
    Round half away from zero at ``digits`` decimals.

    The value is first fixed at 12 decimals so that binary artifacts such as
    0.8935 stored as 0.89349999... still round up.
    """

    exact = Decimal(f"{value:.12f}")
    quantum = Decimal(1).scaleb(-digits)
    return float(exact.quantize(quantum, rounding=ROUND_HALF_UP))


@dataclass(frozen=True, slots=True)
class PRF:
    precision: float
    recall: float
    f1: float
    true_positives: int = 0
    false_positives: int = 0
    false_negatives: int = 0

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "true_positives": self.true_positives,
            "false_positives": self.false_positives,
            "false_negatives": self.false_negatives,
        }


def prf_from_counts(true_positives: int, false_positives: int, false_negatives: int) -> PRF:
    predicted = true_positives + false_positives
    actual = true_positives + false_negatives
    precision = true_positives / predicted if predicted else 0.0
    recall = true_positives / actual if actual else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    if predicted == 0 and actual == 0:
        precision = recall = f1 = 1.0
    return PRF(precision, recall, f1, true_positives, false_positives, false_negatives)


def prf_from_sets(predicted: Iterable[Hashable], gold: Iterable[Hashable]) -> PRF:
    predicted_set: Set[Hashable] = set(predicted)
    gold_set: Set[Hashable] = set(gold)
    hits = len(predicted_set & gold_set)
    return prf_from_counts(hits, len(predicted_set) - hits, len(gold_set) - hits)


def macro_average(values: Sequence[float]) -> float:
    """Unweighted mean; 0.0 for no values."""

    if not values:
        return 0.0
    return sum(values) / len(values)
