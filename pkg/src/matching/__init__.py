"""
Entity matching: features, oracle labeling, committee active learning and selection.
"""

from .active import (
    ActiveLearningResult,
    augmentation_size,
    run_active_learning,
    select_disagreement_batch,
    static_random_training,
)
from .committee import (
    FAMILIES,
    LearnerSpec,
    TrainedScorer,
    build_estimator,
    check_committee,
    committee_scores,
    search_space,
    train_committee,
    train_scorer,
)
from .evaluation import evaluate_matching
from .features import MISSING, FeatureSpace, FeatureSpec, VALUE_METRICS
from .labeling import (
    LabelingOutcome,
    PairLabeler,
    has_both_classes,
    record_payload,
    seed_labeling,
    widen_seeds,
)
from .models import (
    Label,
    LabeledPair,
    LabelSource,
    PairKey,
    RecordCorrespondence,
    TrainingVariant,
    label_vector,
    load_pair_labels,
    load_record_correspondences,
    save_labeled_pairs,
    save_record_correspondences,
)
from .selection import (
    MatcherModel,
    export_model,
    model_parameters,
    predict,
    sample_validation_pairs,
    select_model,
)
from .similarity import STRING_METRICS, monge_elkan, split_label, string_similarity
from .workflow import PairMatchResult, match_pair

__all__ = [
    "ActiveLearningResult",
    "FAMILIES",
    "FeatureSpace",
    "FeatureSpec",
    "Label",
    "LabelSource",
    "LabeledPair",
    "LabelingOutcome",
    "LearnerSpec",
    "MISSING",
    "MatcherModel",
    "PairKey",
    "PairLabeler",
    "PairMatchResult",
    "RecordCorrespondence",
    "STRING_METRICS",
    "TrainedScorer",
    "TrainingVariant",
    "VALUE_METRICS",
    "augmentation_size",
    "build_estimator",
    "check_committee",
    "committee_scores",
    "evaluate_matching",
    "export_model",
    "has_both_classes",
    "label_vector",
    "load_pair_labels",
    "load_record_correspondences",
    "match_pair",
    "model_parameters",
    "monge_elkan",
    "predict",
    "record_payload",
    "run_active_learning",
    "sample_validation_pairs",
    "save_labeled_pairs",
    "save_record_correspondences",
    "search_space",
    "seed_labeling",
    "select_disagreement_batch",
    "select_model",
    "split_label",
    "static_random_training",
    "string_similarity",
    "train_committee",
    "train_scorer",
    "widen_seeds",
]
