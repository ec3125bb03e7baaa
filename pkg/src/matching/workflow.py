"""
End-to-end entity matching for one dataset pair.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from src.blocking import CandidatePair
from src.config import MatchingConfig
from src.datamodel import Dataset, TargetSchema
from src.oracle import Oracle

from .active import augmentation_size, run_active_learning, static_random_training
from .committee import LearnerSpec, train_committee
from .features import FeatureSpace
from .labeling import PairLabeler, has_both_classes, seed_labeling, widen_seeds
from .models import (
    LabeledPair,
    LabelSource,
    PairKey,
    RecordCorrespondence,
    TrainingVariant,
    label_vector,
)
from .selection import MatcherModel, predict, sample_validation_pairs, select_model

logger = logging.getLogger(__name__)


@dataclass
class PairMatchResult:
    dataset_a: str
    dataset_b: str
    feature_names: List[str]
    model: Optional[MatcherModel] = None
    correspondences: List[RecordCorrespondence] = field(default_factory=list)
    training: List[LabeledPair] = field(default_factory=list)
    validation: List[LabeledPair] = field(default_factory=list)
    rounds: int = 0
    labels_used: int = 0
    exhausted: bool = False

    @property
    def labeled(self) -> List[LabeledPair]:
        return self.training + self.validation


def _label_validation(
    pool: Sequence[CandidatePair],
    used: set[PairKey],
    labeler: PairLabeler,
    size: int,
    seed: int,
) -> List[LabeledPair]:
    """Oracle-labeled validation pairs; one further draw when the first has a single class."""

    validation = labeler.label(
        sample_validation_pairs(pool, used, size, seed), LabelSource.ORACLE_VALIDATION
    ).pairs
    if has_both_classes(validation) or labeler.exhausted:
        return validation
    taken = used | {item.key for item in validation}
    extra = labeler.label(
        sample_validation_pairs(pool, taken, size, seed + 1), LabelSource.ORACLE_VALIDATION
    ).pairs
    return validation + extra


def match_pair(
    dataset_a: Dataset,
    dataset_b: Dataset,
    pool: Sequence[CandidatePair],
    target: TargetSchema,
    attributes: Sequence[str],
    oracle: Oracle,
    config: MatchingConfig,
    seed: int = 0,
) -> PairMatchResult:
    """
    Seed, actively label, select a model and predict over the candidate pool.

    A seed set with a single class is widened first. When no match (or no
    non-match) turns up within the widening, the pair gets no model and no
    correspondences. With ``config.sampling == "random"`` the active loop is
    replaced by a uniform sample of the same label count.
    """

    if dataset_b.name < dataset_a.name:
        dataset_a, dataset_b = dataset_b, dataset_a
    space = FeatureSpace.for_attributes(target, attributes)
    result = PairMatchResult(dataset_a.name, dataset_b.name, space.names)
    if not pool:
        logger.warning("Empty candidate pool for %s x %s", dataset_a.name, dataset_b.name)
        return result

    features = space.matrix(pool, dataset_a, dataset_b)
    row_of = {pair.key: index for index, pair in enumerate(pool)}
    labeler = PairLabeler(oracle, dataset_a, dataset_b, config.label_budget)
    specs = [LearnerSpec.from_config(member) for member in config.committee]

    def rows(labeled: Sequence[LabeledPair]):
        return features[[row_of[item.key] for item in labeled]]

    def finish(training: List[LabeledPair], rounds: int, exhausted: bool) -> None:
        result.training = training
        result.rounds = rounds
        result.labels_used = labeler.used
        result.exhausted = exhausted or labeler.exhausted

    augmented: List[LabeledPair] = []
    rounds = 0
    exhausted = False
    if config.sampling == "random":
        size = config.target_size + augmentation_size(config.target_size, config.augment_fraction)
        core = static_random_training(pool, labeler, size, seed)
    else:
        seeds = seed_labeling(pool, labeler, config.seed_target, config.per_query_bottom)
        if not has_both_classes(seeds.pairs):
            seeds = widen_seeds(pool, labeler, seeds, config.seed_target, seed)
        core = seeds.pairs
    if not has_both_classes(core):
        logger.warning(
            "No model for %s x %s: %d labeled pairs hold a single class",
            dataset_a.name,
            dataset_b.name,
            len(core),
        )
        finish(core, 0, labeler.exhausted)
        return result

    if config.sampling != "random":
        active = run_active_learning(
            pool,
            features,
            core,
            labeler,
            specs,
            batch_size=config.batch_size,
            target_size=config.target_size,
            augment_fraction=config.augment_fraction,
            search_budget=config.search_budget,
            seed=seed,
        )
        core, augmented = active.core, active.augmented
        rounds, exhausted = active.rounds, active.exhausted

    training = augmented or core
    validation = _label_validation(
        pool, {item.key for item in training}, labeler, config.validation_size, seed
    )
    committees = {
        TrainingVariant.CORE: train_committee(
            specs, rows(core), label_vector(core), config.search_budget
        )
    }
    if len(augmented) > len(core):
        committees[TrainingVariant.AUGMENTED] = train_committee(
            specs, rows(augmented), label_vector(augmented), config.search_budget
        )
    scored = validation
    if not has_both_classes(validation):
        logger.warning(
            "Validation set for %s x %s holds a single class; selecting on training labels",
            dataset_a.name,
            dataset_b.name,
        )
        scored = training
    model = select_model(committees, rows(scored), label_vector(scored), config.threshold_grid)

    result.model = model
    result.correspondences = predict(model, pool, features)
    result.validation = validation
    finish(training, rounds, exhausted)
    logger.info(
        "Matched %s x %s: %d correspondences from %d pool pairs (%d oracle labels)",
        dataset_a.name,
        dataset_b.name,
        len(result.correspondences),
        len(pool),
        labeler.used,
    )
    return result
