"""
Labeled pairs, record correspondences and their delimited-file formats.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple

import pandas as pd

from src.blocking import CandidatePair, RecordRef
from src.errors import DatasetError

PairKey = Tuple[str, str]


class Label(str, Enum):
    MATCH = "match"
    NON_MATCH = "non-match"


class LabelSource(str, Enum):
    ORACLE_SEED = "oracle-seed"
    ORACLE_ACTIVE = "oracle-active"
    ORACLE_RANDOM = "oracle-random"
    ORACLE_VALIDATION = "oracle-validation"
    GOLD = "gold"


class TrainingVariant(str, Enum):
    CORE = "core"
    AUGMENTED = "core+random-augmented"


@dataclass(frozen=True, slots=True)
class LabeledPair:
    pair: CandidatePair
    label: Label
    label_source: LabelSource

    @property
    def key(self) -> PairKey:
        return self.pair.key

    @property
    def is_match(self) -> bool:
        return self.label is Label.MATCH


@dataclass(frozen=True, slots=True)
class RecordCorrespondence:
    """A predicted match between two records of different datasets."""

    record_a: RecordRef
    record_b: RecordRef
    score: float

    @property
    def key(self) -> PairKey:
        return (self.record_a.id, self.record_b.id)


def label_vector(labeled: Sequence[LabeledPair]) -> List[int]:
    return [1 if item.is_match else 0 for item in labeled]


PAIR_COLUMNS = ["id_a", "id_b", "label", "label_source"]


def save_labeled_pairs(labeled: Iterable[LabeledPair], path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(
        [
            (
                item.pair.record_a.id,
                item.pair.record_b.id,
                item.label.value,
                item.label_source.value,
            )
            for item in labeled
        ],
        columns=PAIR_COLUMNS,
    )
    frame.to_csv(path, index=False, encoding="utf-8")
    return path


def load_pair_labels(path: Path | str) -> Dict[PairKey, Tuple[Label, LabelSource]]:
    """Read a pair file; ``label_source`` defaults to ``gold`` when the column is absent."""

    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"pair file not found: {path}")
    frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    missing = [column for column in ("id_a", "id_b", "label") if column not in frame.columns]
    if missing:
        raise DatasetError(f"pair file {path} lacks columns {missing}", offending=missing)
    labels: Dict[PairKey, Tuple[Label, LabelSource]] = {}
    for row in frame.to_dict("records"):
        key = (row["id_a"], row["id_b"])
        if key in labels:
            raise DatasetError(f"pair {key} labeled twice in {path}", offending=[key])
        try:
            label = Label(row["label"].strip())
            source = LabelSource(row.get("label_source") or LabelSource.GOLD.value)
        except ValueError as exc:
            raise DatasetError(f"bad label row in {path}: {row}", offending=[key]) from exc
        labels[key] = (label, source)
    return labels


CORRESPONDENCE_COLUMNS = ["dataset_a", "id_a", "dataset_b", "id_b", "score"]


def save_record_correspondences(
    correspondences: Iterable[RecordCorrespondence], path: Path | str
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(
        [
            (
                item.record_a.dataset,
                item.record_a.id,
                item.record_b.dataset,
                item.record_b.id,
                item.score,
            )
            for item in correspondences
        ],
        columns=CORRESPONDENCE_COLUMNS,
    )
    frame.to_csv(path, index=False, encoding="utf-8")
    return path


def load_record_correspondences(path: Path | str) -> List[RecordCorrespondence]:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"record correspondences not found: {path}")
    frame = pd.read_csv(
        path,
        dtype={"dataset_a": str, "id_a": str, "dataset_b": str, "id_b": str},
        keep_default_na=False,
    )
    return [
        RecordCorrespondence(
            record_a=RecordRef(row.dataset_a, row.id_a),
            record_b=RecordRef(row.dataset_b, row.id_b),
            score=float(row.score),
        )
        for row in frame.itertuples(index=False)
    ]
