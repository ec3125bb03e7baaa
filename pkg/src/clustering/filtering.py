"""
One-to-one filtering of record correspondences within a dataset pair.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from src.matching import RecordCorrespondence

logger = logging.getLogger(__name__)


def _order(item: RecordCorrespondence) -> Tuple[float, str, str]:
    return (-item.score, item.record_a.id, item.record_b.id)


def bipartite_filter(correspondences: Sequence[RecordCorrespondence]) -> List[RecordCorrespondence]:
    """Greedy score-descending matching; ties break on (id_a, id_b)."""

    used_a: set[str] = set()
    used_b: set[str] = set()
    kept: List[RecordCorrespondence] = []
    for item in sorted(correspondences, key=_order):
        if item.record_a.id in used_a or item.record_b.id in used_b:
            continue
        used_a.add(item.record_a.id)
        used_b.add(item.record_b.id)
        kept.append(item)
    return kept


def exact_bipartite_filter(
    correspondences: Sequence[RecordCorrespondence],
) -> List[RecordCorrespondence]:
    """Maximum-weight one-to-one matching over the correspondence edges."""

    if not correspondences:
        return []
    left = sorted({item.record_a.id for item in correspondences})
    right = sorted({item.record_b.id for item in correspondences})
    row = {record_id: index for index, record_id in enumerate(left)}
    column = {record_id: index for index, record_id in enumerate(right)}
    weights = np.zeros((len(left), len(right)), dtype=np.float64)
    edges: Dict[Tuple[int, int], RecordCorrespondence] = {}
    for item in sorted(correspondences, key=_order):
        cell = (row[item.record_a.id], column[item.record_b.id])
        if cell not in edges:
            edges[cell] = item
            weights[cell] = item.score
    rows, columns = linear_sum_assignment(weights, maximize=True)
    kept = [
        edges[(int(r), int(c))] for r, c in zip(rows, columns) if (int(r), int(c)) in edges
    ]
    return sorted(kept, key=_order)


def group_by_pair(
    correspondences: Iterable[RecordCorrespondence],
) -> Dict[Tuple[str, str], List[RecordCorrespondence]]:
    grouped: Dict[Tuple[str, str], List[RecordCorrespondence]] = defaultdict(list)
    for item in correspondences:
        grouped[(item.record_a.dataset, item.record_b.dataset)].append(item)
    return dict(grouped)


FILTERS = {"greedy": bipartite_filter, "exact": exact_bipartite_filter}


def filter_all(
    correspondences: Iterable[RecordCorrespondence], matching: str = "greedy"
) -> List[RecordCorrespondence]:
    """Apply the chosen one-to-one filter per dataset pair."""

    select = FILTERS[matching]
    kept: List[RecordCorrespondence] = []
    for pair, items in sorted(group_by_pair(correspondences).items()):
        retained = select(items)
        logger.debug("%s x %s: kept %d of %d correspondences", *pair, len(retained), len(items))
        kept.extend(retained)
    return kept


@dataclass(frozen=True, slots=True)
class FilterComparison:
    greedy_score: float
    exact_score: float
    greedy_count: int
    exact_count: int

    @property
    def gap(self) -> float:
        return self.exact_score - self.greedy_score


def compare_filters(correspondences: Sequence[RecordCorrespondence]) -> FilterComparison:
    greedy = bipartite_filter(correspondences)
    exact = exact_bipartite_filter(correspondences)
    comparison = FilterComparison(
        greedy_score=sum(item.score for item in greedy),
        exact_score=sum(item.score for item in exact),
        greedy_count=len(greedy),
        exact_count=len(exact),
    )
    if comparison.gap > 1e-9:
        logger.warning(
            "Greedy matching retains %.4f less score than exact matching", comparison.gap
        )
    return comparison
