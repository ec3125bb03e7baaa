"""
Validation sampling, model/threshold selection, prediction and model export.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np
from sklearn.ensemble import GradientBoostingClassifier, RandomForestClassifier
from sklearn.linear_model import LogisticRegression
from sklearn.metrics import f1_score

from src.blocking import CandidatePair
from src.errors import TrainingDataError

from .committee import TrainedScorer
from .models import PairKey, RecordCorrespondence, TrainingVariant

logger = logging.getLogger(__name__)

_VARIANT_ORDER = {TrainingVariant.CORE: 0, TrainingVariant.AUGMENTED: 1}


def sample_validation_pairs(
    pool: Sequence[CandidatePair],
    exclude: set[PairKey],
    size: int = 200,
    seed: int = 0,
) -> List[CandidatePair]:
    """Half from the top similarity decile of the pool, half uniform, none from ``exclude``."""

    ordered = sorted(pool, key=lambda pair: (-pair.similarity, pair.record_a.id, pair.record_b.id))
    available = [pair for pair in ordered if pair.key not in exclude]
    if len(available) <= size:
        return available
    rng = np.random.default_rng(seed)
    decile = set(pair.key for pair in ordered[: max(1, math.ceil(len(ordered) / 10))])
    top = [index for index, pair in enumerate(available) if pair.key in decile]
    top_count = min(size // 2, len(top))
    chosen = set(rng.choice(top, size=top_count, replace=False).tolist()) if top_count else set()
    rest = [index for index in range(len(available)) if index not in chosen]
    chosen |= set(rng.choice(rest, size=size - top_count, replace=False).tolist())
    return [available[index] for index in sorted(chosen)]


@dataclass
class MatcherModel:
    scorer: TrainedScorer
    threshold: float
    variant: TrainingVariant
    validation_f1: float
    member_index: int = 0

    def scores(self, features: np.ndarray) -> np.ndarray:
        return self.scorer.predict_proba(features)

    def is_match(self, score: float) -> bool:
        return score >= self.threshold


def select_model(
    committees: Dict[TrainingVariant, Sequence[TrainedScorer]],
    features: np.ndarray,
    labels: Sequence[int],
    threshold_grid: Sequence[float],
) -> MatcherModel:
    """
    Best (variant, member, threshold) by validation F1.

    Ties prefer the higher threshold, then family name order, then the core
    variant, then the earlier committee member.
    """

    y = np.asarray(labels, dtype=np.int64)
    if len(np.unique(y)) < 2:
        raise TrainingDataError("validation set needs both matches and non-matches")

    ranked: List[Tuple[Tuple[Any, ...], MatcherModel]] = []
    for variant, scorers in committees.items():
        for index, scorer in enumerate(scorers):
            scores = scorer.predict_proba(features)
            for threshold in threshold_grid:
                predicted = (scores >= threshold).astype(np.int64)
                f1 = float(f1_score(y, predicted, zero_division=0.0))
                key = (-round(f1, 12), -threshold, scorer.family, _VARIANT_ORDER[variant], index)
                ranked.append((key, MatcherModel(scorer, threshold, variant, f1, index)))
    if not ranked:
        raise ValueError("no candidate models to select from")
    ranked.sort(key=lambda item: item[0])
    best = ranked[0][1]
    logger.info(
        "Selected %s member %d (%s) at threshold %.2f: validation F1 %.3f",
        best.scorer.family,
        best.member_index,
        best.variant.value,
        best.threshold,
        best.validation_f1,
    )
    return best


def predict(
    model: MatcherModel, pairs: Sequence[CandidatePair], features: np.ndarray
) -> List[RecordCorrespondence]:
    """Correspondences for the pairs scoring at or above the model threshold."""

    if not pairs:
        return []
    scores = model.scores(features)
    return [
        RecordCorrespondence(pair.record_a, pair.record_b, float(score))
        for pair, score in zip(pairs, scores)
        if model.is_match(float(score))
    ]


def _tree_nodes(tree: Any) -> Dict[str, Any]:
    structure = tree.tree_
    return {
        "children_left": structure.children_left.tolist(),
        "children_right": structure.children_right.tolist(),
        "feature": structure.feature.tolist(),
        "threshold": structure.threshold.tolist(),
        "value": structure.value.reshape(structure.node_count, -1).tolist(),
    }


def model_parameters(estimator: Any) -> Dict[str, Any]:
    if isinstance(estimator, LogisticRegression):
        return {
            "coefficients": estimator.coef_[0].tolist(),
            "intercept": float(estimator.intercept_[0]),
        }
    if isinstance(estimator, RandomForestClassifier):
        return {"trees": [_tree_nodes(tree) for tree in estimator.estimators_]}
    if isinstance(estimator, GradientBoostingClassifier):
        return {
            "learning_rate": estimator.learning_rate,
            "prior": estimator.init_.class_prior_.tolist(),
            "trees": [_tree_nodes(stage[0]) for stage in estimator.estimators_],
        }
    raise TypeError(f"cannot export {type(estimator).__name__}")


def export_model(model: MatcherModel, feature_names: Sequence[str], path: Path | str) -> Path:
    document = {
        "family": model.scorer.family,
        "seed": model.scorer.spec.seed,
        "hyperparameters": model.scorer.parameters,
        "threshold": model.threshold,
        "training_variant": model.variant.value,
        "validation_f1": model.validation_f1,
        "features": list(feature_names),
        "parameters": model_parameters(model.scorer.estimator),
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, indent=2, default=str) + "\n", encoding="utf-8")
    return path
