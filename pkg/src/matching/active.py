"""
Committee-disagreement active learning and the random-sample baseline.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from decimal import Decimal
from typing import List, Sequence

import numpy as np

from src.blocking import CandidatePair

from .committee import LearnerSpec, committee_scores, train_committee
from .labeling import PairLabeler
from .models import LabeledPair, LabelSource, PairKey, label_vector

logger = logging.getLogger(__name__)


def select_disagreement_batch(
    candidates: Sequence[CandidatePair],
    scores: np.ndarray,
    n: int = 100,
) -> List[CandidatePair]:
    """
    Top-``n`` candidates by population variance of the members' scores.

    ``scores`` is members x candidates. Ties break on (id_a, id_b).
    """

    if len(candidates) == 0 or n <= 0:
        return []
    if scores.shape[0] < 2:
        raise ValueError("disagreement needs at least two scorers")
    variances = np.round(np.var(scores, axis=0), 12)
    order = sorted(
        range(len(candidates)),
        key=lambda index: (
            -variances[index],
            candidates[index].record_a.id,
            candidates[index].record_b.id,
        ),
    )
    return [candidates[index] for index in order[:n]]


@dataclass
class ActiveLearningResult:
    core: List[LabeledPair]
    augmented: List[LabeledPair]
    rounds: int = 0
    exhausted: bool = False


def augmentation_size(core_size: int, fraction: float) -> int:
    return math.ceil(Decimal(str(fraction)) * core_size)


def _uniform_sample(
    pool: Sequence[CandidatePair], exclude: set[PairKey], size: int, seed: int
) -> List[CandidatePair]:
    available = [pair for pair in pool if pair.key not in exclude]
    if size >= len(available):
        return available
    rng = np.random.default_rng(seed)
    chosen = sorted(rng.choice(len(available), size=size, replace=False).tolist())
    return [available[index] for index in chosen]


def run_active_learning(
    pool: Sequence[CandidatePair],
    features: np.ndarray,
    seeds: Sequence[LabeledPair],
    labeler: PairLabeler,
    specs: Sequence[LearnerSpec],
    *,
    batch_size: int = 100,
    target_size: int = 600,
    augment_fraction: float = 0.2,
    search_budget: int = 5,
    seed: int = 0,
) -> ActiveLearningResult:
    """
    Grow the seed set by committee disagreement until ``target_size`` labels.

    Each round retrains the committee on the current core set, labels the
    ``min(batch_size, target_size - |core|)`` most disputed unlabeled pool pairs
    and adds them. The augmented variant extends the final core set with
    ``ceil(augment_fraction * |core|)`` uniformly sampled pool pairs.
    ``features`` holds one row per pool pair in pool order.
    """

    row_of = {pair.key: index for index, pair in enumerate(pool)}
    core: List[LabeledPair] = list(seeds)
    labeled_keys = {item.key for item in core}
    rounds = 0
    exhausted = labeler.exhausted

    while len(core) < target_size and not exhausted:
        committee = train_committee(
            specs, features[[row_of[item.key] for item in core]], label_vector(core), search_budget
        )
        unlabeled = [pair for pair in pool if pair.key not in labeled_keys]
        if not unlabeled:
            break
        rows = features[[row_of[pair.key] for pair in unlabeled]]
        wanted = min(batch_size, target_size - len(core))
        batch = select_disagreement_batch(unlabeled, committee_scores(committee, rows), wanted)
        outcome = labeler.label(batch, LabelSource.ORACLE_ACTIVE)
        for item in outcome.pairs:
            if item.key not in labeled_keys:
                labeled_keys.add(item.key)
                core.append(item)
        rounds += 1
        exhausted = outcome.exhausted
        logger.info(
            "Active learning round %d: +%d labels, %d total", rounds, len(outcome.pairs), len(core)
        )

    augmented = list(core)
    if not exhausted:
        size = augmentation_size(len(core), augment_fraction)
        extra = _uniform_sample(pool, labeled_keys, size, seed)
        outcome = labeler.label(extra, LabelSource.ORACLE_RANDOM)
        augmented.extend(item for item in outcome.pairs if item.key not in labeled_keys)
        exhausted = outcome.exhausted
    if exhausted:
        logger.warning("Active learning stopped at %d core labels: budget exhausted", len(core))
    return ActiveLearningResult(core=core, augmented=augmented, rounds=rounds, exhausted=exhausted)


def static_random_training(
    pool: Sequence[CandidatePair], labeler: PairLabeler, size: int, seed: int = 0
) -> List[LabeledPair]:
    """Uniform random training set of ``size`` oracle-labeled pool pairs."""

    sample = _uniform_sample(pool, set(), size, seed)
    return labeler.label(sample, LabelSource.ORACLE_RANDOM).pairs
