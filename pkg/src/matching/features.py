"""
Datatype-dependent similarity features for candidate record pairs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from datetime import date
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.blocking import CandidatePair
from src.datamodel import Dataset, Record, TargetSchema, Value, ValueType
from src.datamodel.profiling import value_text

from .similarity import STRING_METRICS

logger = logging.getLogger(__name__)

MISSING = -1.0
YEAR_SPAN = 10
DAY_SPAN = 365
EMBEDDING_FEATURE = "embedding:cosine"

ValueMetric = Callable[[Value, Value], Optional[float]]


def _as_float(value: Value) -> Optional[float]:
    if isinstance(value, bool):
        return None
    if isinstance(value, (int, float)):
        return float(value)
    try:
        return float(str(value))
    except ValueError:
        return None


def scaled_abs_diff(left: Value, right: Value) -> Optional[float]:
    """``1 - |a - b| / max(|a|, |b|)``; equal numbers give 1.0."""

    a, b = _as_float(left), _as_float(right)
    if a is None or b is None:
        return None
    scale = max(abs(a), abs(b))
    if scale == 0:
        return 1.0
    return max(0.0, 1.0 - abs(a - b) / scale)


def _as_date(value: Value) -> Optional[date]:
    if isinstance(value, date):
        return value
    try:
        return date.fromisoformat(str(value))
    except ValueError:
        return None


def year_diff(left: Value, right: Value) -> Optional[float]:
    a, b = _as_date(left), _as_date(right)
    if a is None or b is None:
        return None
    return 1.0 - min(abs(a.year - b.year), YEAR_SPAN) / YEAR_SPAN


def day_diff(left: Value, right: Value) -> Optional[float]:
    a, b = _as_date(left), _as_date(right)
    if a is None or b is None:
        return None
    return 1.0 - min(abs((a - b).days), DAY_SPAN) / DAY_SPAN


def list_jaccard(left: Value, right: Value) -> Optional[float]:
    def items(value: Value) -> set[str]:
        raw = value if isinstance(value, list) else [value]
        return {str(item).strip().casefold() for item in raw if str(item).strip()}

    a, b = items(left), items(right)
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def _string_metric(name: str) -> ValueMetric:
    metric = STRING_METRICS[name]

    def compare(left: Value, right: Value) -> float:
        return metric(value_text(left).strip().casefold(), value_text(right).strip().casefold())

    return compare


VALUE_METRICS: Dict[str, ValueMetric] = {
    **{name: _string_metric(name) for name in STRING_METRICS},
    "scaled-abs-diff": scaled_abs_diff,
    "year-diff": year_diff,
    "day-diff": day_diff,
    "jaccard": list_jaccard,
}

_METRICS_BY_TYPE: Dict[ValueType, Tuple[str, ...]] = {
    ValueType.NUMBER: ("scaled-abs-diff",),
    ValueType.INTEGER: ("scaled-abs-diff",),
    ValueType.DURATION: ("scaled-abs-diff",),
    ValueType.DATE: ("year-diff", "day-diff"),
    ValueType.LIST: ("jaccard",),
}
_STRING_FEATURES = ("jaccard-token", "jaro-winkler", "levenshtein-sim", "cosine-tfidf-char3")


@dataclass(frozen=True, slots=True)
class FeatureSpec:
    attribute: str
    metric: str

    @property
    def name(self) -> str:
        return f"{self.attribute}:{self.metric}"


@dataclass(frozen=True)
class FeatureSpace:
    """Fixed, ordered feature layout for one dataset pair."""

    specs: Tuple[FeatureSpec, ...]

    @classmethod
    def for_attributes(cls, target: TargetSchema, attributes: Sequence[str]) -> "FeatureSpace":
        specs: List[FeatureSpec] = []
        for name in attributes:
            declared = target.attribute(name).declared_type
            for metric in _METRICS_BY_TYPE.get(declared, _STRING_FEATURES):
                specs.append(FeatureSpec(name, metric))
        return cls(tuple(specs))

    @property
    def names(self) -> List[str]:
        return [spec.name for spec in self.specs] + [EMBEDDING_FEATURE]

    def __len__(self) -> int:
        return len(self.specs) + 1

    def vector(self, left: Record, right: Record, embedding_cosine: float) -> np.ndarray:
        features = np.full(len(self), MISSING, dtype=np.float64)
        for index, spec in enumerate(self.specs):
            a, b = left.values.get(spec.attribute), right.values.get(spec.attribute)
            if a is None or b is None:
                continue
            score = VALUE_METRICS[spec.metric](a, b)
            if score is not None:
                features[index] = min(1.0, max(0.0, score))
        features[-1] = min(1.0, max(0.0, embedding_cosine))
        return features

    def matrix(
        self, pairs: Sequence[CandidatePair], dataset_a: Dataset, dataset_b: Dataset
    ) -> np.ndarray:
        """One row per pair, in pair order; the pool similarity is the embedding feature."""

        if not pairs:
            return np.empty((0, len(self)), dtype=np.float64)
        rows = []
        for pair in pairs:
            left, right = _orient(pair, dataset_a, dataset_b)
            rows.append(self.vector(left, right, pair.similarity))
        logger.debug("Computed %d x %d feature matrix", len(rows), len(self))
        return np.vstack(rows)


def _orient(pair: CandidatePair, dataset_a: Dataset, dataset_b: Dataset) -> Tuple[Record, Record]:
    if pair.record_a.dataset == dataset_a.name:
        return dataset_a.record(pair.record_a.id), dataset_b.record(pair.record_b.id)
    return dataset_b.record(pair.record_a.id), dataset_a.record(pair.record_b.id)
