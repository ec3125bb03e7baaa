"""
Oracle pair labeling with a label-count budget, and seed-set construction.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from src.blocking import CandidatePair
from src.datamodel import Dataset, Record
from src.datamodel.profiling import value_text
from src.errors import BudgetExhausted
from src.oracle import Oracle, PairLabelReply, TaskTag, build_request

from .models import Label, LabeledPair, LabelSource, PairKey

logger = logging.getLogger(__name__)


def record_payload(dataset: str, record: Record) -> Dict[str, Any]:
    """JSON-ready view of a record: non-null values as text."""

    return {
        "dataset": dataset,
        "id": record.id,
        "values": {
            name: value_text(value) for name, value in record.values.items() if value is not None
        },
    }


@dataclass
class LabelingOutcome:
    pairs: List[LabeledPair] = field(default_factory=list)
    exhausted: bool = False


class PairLabeler:
    """
    Labels candidate pairs through the oracle.

    Each pair is labeled at most once per labeler; a repeated request returns the
    stored label without a call. ``budget`` caps the number of oracle labels.
    """

    def __init__(
        self,
        oracle: Oracle,
        dataset_a: Dataset,
        dataset_b: Dataset,
        budget: Optional[int] = None,
    ) -> None:
        self.oracle = oracle
        self.datasets = {dataset_a.name: dataset_a, dataset_b.name: dataset_b}
        self.budget = budget
        self.used = 0
        self.exhausted = False
        self._labels: Dict[PairKey, Label] = {}

    @property
    def remaining(self) -> Optional[int]:
        if self.budget is None:
            return None
        return max(0, self.budget - self.used)

    def known(self, pair: CandidatePair) -> Optional[Label]:
        return self._labels.get(pair.key)

    def _request(self, pair: CandidatePair):
        left = self.datasets[pair.record_a.dataset].record(pair.record_a.id)
        right = self.datasets[pair.record_b.dataset].record(pair.record_b.id)
        return build_request(
            TaskTag.PAIR_LABEL,
            {
                "record_a": record_payload(pair.record_a.dataset, left),
                "record_b": record_payload(pair.record_b.dataset, right),
            },
        )

    def label(self, pairs: Sequence[CandidatePair], source: LabelSource) -> LabelingOutcome:
        """Label ``pairs`` in order, truncating at the budget."""

        outcome = LabelingOutcome()
        fresh: List[CandidatePair] = []
        seen: set[PairKey] = set()
        for pair in pairs:
            if pair.key in self._labels or pair.key in seen:
                continue
            seen.add(pair.key)
            fresh.append(pair)
        remaining = self.remaining
        if remaining is not None and len(fresh) > remaining:
            fresh = fresh[:remaining]
            outcome.exhausted = True

        if fresh:
            try:
                replies = self.oracle.invoke_many([self._request(pair) for pair in fresh])
            except BudgetExhausted as exc:
                logger.warning("Oracle budget exhausted while labeling: %s", exc)
                replies = []
                fresh = []
                outcome.exhausted = True
            for pair, reply in zip(fresh, replies):
                assert isinstance(reply, PairLabelReply)
                self._labels[pair.key] = Label(reply.label)
            self.used += len(fresh)

        returned: set[PairKey] = set()
        for pair in pairs:
            label = self._labels.get(pair.key)
            if label is not None and pair.key not in returned:
                returned.add(pair.key)
                outcome.pairs.append(LabeledPair(pair, label, source))
        if outcome.exhausted:
            self.exhausted = True
        return outcome


def _queries(pool: Sequence[CandidatePair]) -> Dict[str, List[CandidatePair]]:
    """Candidates per query record (the ``record_a`` side), most similar first."""

    grouped: Dict[str, List[CandidatePair]] = {}
    ordered = sorted(pool, key=lambda item: (-item.similarity, item.record_a.id, item.record_b.id))
    for pair in ordered:
        grouped.setdefault(pair.record_a.id, []).append(pair)
    return grouped


def seed_labeling(
    pool: Sequence[CandidatePair],
    labeler: PairLabeler,
    target_seed_count: int = 100,
    per_query_bottom: int = 2,
) -> LabelingOutcome:
    """
    Build the seed training set.

    Queries are visited in order of their best candidate similarity. Each query's
    candidates are labeled most-similar first until one match and two non-matches
    are found or the candidates run out; then its ``per_query_bottom`` least similar
    candidates are labeled too. Stops once the target count is reached.
    """

    outcome = LabelingOutcome()
    labeled: Dict[PairKey, LabeledPair] = {}

    def take(result: LabelingOutcome) -> None:
        for item in result.pairs:
            if item.key not in labeled:
                labeled[item.key] = item
                outcome.pairs.append(item)
        if result.exhausted:
            outcome.exhausted = True

    for candidates in _queries(pool).values():
        if len(labeled) >= target_seed_count or outcome.exhausted:
            break
        matches = non_matches = 0
        for pair in candidates:
            if matches >= 1 and non_matches >= 2:
                break
            if len(labeled) >= target_seed_count or outcome.exhausted:
                break
            result = labeler.label([pair], LabelSource.ORACLE_SEED)
            take(result)
            for item in result.pairs:
                if item.is_match:
                    matches += 1
                else:
                    non_matches += 1
        if per_query_bottom and not outcome.exhausted:
            tail = [pair for pair in candidates[-per_query_bottom:] if pair.key not in labeled]
            if tail:
                take(labeler.label(tail, LabelSource.ORACLE_SEED))

    if outcome.exhausted:
        logger.warning("Seed labeling stopped early at %d labels: budget exhausted", len(labeled))
    matches = sum(1 for item in outcome.pairs if item.is_match)
    logger.info("Seed set: %d pairs (%d matches)", len(outcome.pairs), matches)
    return outcome


def has_both_classes(pairs: Sequence[LabeledPair]) -> bool:
    return len({item.label for item in pairs}) == 2


def widen_seeds(
    pool: Sequence[CandidatePair],
    labeler: PairLabeler,
    seeds: LabelingOutcome,
    extra: int,
    seed: int = 0,
) -> LabelingOutcome:
    """
    Extend a single-class seed set until it holds matches and non-matches.

    Spends at most ``extra`` further labels: the first half walks every query's
    unlabeled candidates rank by rank, most similar first, the rest goes to
    uniformly sampled pool pairs. Stops as soon as both classes are present.
    """

    outcome = LabelingOutcome(list(seeds.pairs), seeds.exhausted)
    labeled = {item.key for item in outcome.pairs}

    def extend(candidates: Sequence[CandidatePair], limit: int) -> int:
        spent = 0
        for pair in candidates:
            if spent >= limit or outcome.exhausted or has_both_classes(outcome.pairs):
                break
            if pair.key in labeled:
                continue
            result = labeler.label([pair], LabelSource.ORACLE_SEED)
            spent += 1
            for item in result.pairs:
                if item.key not in labeled:
                    labeled.add(item.key)
                    outcome.pairs.append(item)
            if result.exhausted:
                outcome.exhausted = True
        return spent

    queries = list(_queries(pool).values())
    depth = max((len(candidates) for candidates in queries), default=0)
    ranked = [
        candidates[rank]
        for rank in range(depth)
        for candidates in queries
        if rank < len(candidates)
    ]
    spent = extend(ranked, math.ceil(extra / 2))

    rest = [pair for pair in pool if pair.key not in labeled]
    order = np.random.default_rng(seed).permutation(len(rest)).tolist()
    extend([rest[index] for index in order], extra - spent)

    matches = sum(1 for item in outcome.pairs if item.is_match)
    logger.info("Widened seed set to %d pairs (%d matches)", len(outcome.pairs), matches)
    return outcome
