"""
Committee of match scorers tuned by randomized search.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Sequence

import numpy as np
from scipy.stats import loguniform
from sklearn.base import BaseEstimator, clone
from sklearn.ensemble import GradientBoostingClassifier, RandomForestClassifier
from sklearn.linear_model import LogisticRegression
from sklearn.model_selection import RandomizedSearchCV, StratifiedKFold
from sklearn.utils.class_weight import compute_sample_weight

from src.config import LearnerConfig
from src.errors import TrainingDataError

logger = logging.getLogger(__name__)

FAMILIES = ("bagged-trees", "boosted-trees", "regularized-linear")
CV_FOLDS = 3


@dataclass(frozen=True)
class LearnerSpec:
    family: str
    hyperparameters: Mapping[str, Any] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown learner family {self.family!r}")

    @classmethod
    def from_config(cls, config: LearnerConfig) -> "LearnerSpec":
        return cls(config.family, dict(config.hyperparameters), config.seed)


def check_committee(specs: Sequence[LearnerSpec]) -> None:
    if len(specs) < 3 or len({spec.family for spec in specs}) < 2:
        raise ValueError("a committee needs at least 3 members spanning at least 2 families")


def search_space(family: str) -> Dict[str, Any]:
    if family == "regularized-linear":
        return {"C": loguniform(1e-2, 1e2)}
    if family == "bagged-trees":
        return {
            "n_estimators": [20, 50, 100],
            "min_samples_leaf": [1, 2, 4],
            "max_features": ["sqrt", "log2", None],
        }
    return {
        "n_estimators": [50, 100, 200],
        "max_depth": [2, 3, 4],
        "subsample": [0.7, 0.85, 1.0],
    }


def build_estimator(spec: LearnerSpec) -> BaseEstimator:
    params = dict(spec.hyperparameters)
    if spec.family == "regularized-linear":
        return LogisticRegression(
            class_weight="balanced", max_iter=1000, random_state=spec.seed, **params
        )
    if spec.family == "bagged-trees":
        params.setdefault("n_estimators", 100)
        return RandomForestClassifier(class_weight="balanced", random_state=spec.seed, **params)
    return GradientBoostingClassifier(random_state=spec.seed, **params)


@dataclass
class TrainedScorer:
    spec: LearnerSpec
    estimator: BaseEstimator
    parameters: Dict[str, Any]
    cv_f1: float | None = None

    @property
    def family(self) -> str:
        return self.spec.family

    def predict_proba(self, features: np.ndarray) -> np.ndarray:
        """Match probability per row."""

        if features.shape[0] == 0:
            return np.empty(0, dtype=np.float64)
        probabilities = self.estimator.predict_proba(features)
        column = list(self.estimator.classes_).index(1)
        return probabilities[:, column].astype(np.float64)


def _check_classes(labels: np.ndarray) -> np.ndarray:
    classes, counts = np.unique(labels, return_counts=True)
    if len(classes) < 2:
        raise TrainingDataError(
            f"training data has a single class ({classes.tolist()}); widen the seed set"
        )
    return counts


def train_scorer(
    spec: LearnerSpec, features: np.ndarray, labels: Sequence[int], search_budget: int = 5
) -> TrainedScorer:
    """
    Fit one committee member.

    Hyperparameters not fixed in ``spec.hyperparameters`` are drawn ``search_budget`` times and
    scored by stratified 3-fold F1. The search is skipped when the minority class
    has fewer than three examples.
    """

    y = np.asarray(labels, dtype=np.int64)
    counts = _check_classes(y)
    estimator = build_estimator(spec)
    space = {
        name: values
        for name, values in search_space(spec.family).items()
        if name not in spec.hyperparameters
    }
    fit_params: Dict[str, Any] = {}
    if spec.family == "boosted-trees":
        fit_params["sample_weight"] = compute_sample_weight("balanced", y)

    if space and counts.min() >= CV_FOLDS:
        search = RandomizedSearchCV(
            estimator,
            space,
            n_iter=search_budget,
            scoring="f1",
            cv=StratifiedKFold(CV_FOLDS, shuffle=True, random_state=spec.seed),
            random_state=spec.seed,
            refit=True,
        )
        search.fit(features, y, **fit_params)
        parameters = {**dict(spec.hyperparameters), **search.best_params_}
        logger.debug(
            "%s (seed %d): best CV F1 %.3f with %s",
            spec.family,
            spec.seed,
            search.best_score_,
            search.best_params_,
        )
        return TrainedScorer(spec, search.best_estimator_, parameters, float(search.best_score_))

    fitted = clone(estimator).fit(features, y, **fit_params)
    return TrainedScorer(spec, fitted, dict(spec.hyperparameters))


def train_committee(
    specs: Sequence[LearnerSpec],
    features: np.ndarray,
    labels: Sequence[int],
    search_budget: int = 5,
) -> List[TrainedScorer]:
    check_committee(specs)
    _check_classes(np.asarray(labels))
    return [train_scorer(spec, features, labels, search_budget) for spec in specs]


def committee_scores(scorers: Sequence[TrainedScorer], features: np.ndarray) -> np.ndarray:
    """Members x pairs matrix of match probabilities."""

    return np.vstack([scorer.predict_proba(features) for scorer in scorers])
