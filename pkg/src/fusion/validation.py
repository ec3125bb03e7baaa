"""
Fusion validation sets: oracle generation and delimited-file storage.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.clustering import EntityCluster
from src.datamodel import Dataset, TargetSchema
from src.errors import ConfigurationError, DatasetError
from src.matching import record_payload
from src.oracle import GroundTruthReply, Oracle, SelectEntitiesReply, TaskTag, build_request

from .engine import candidates_for, cluster_records, has_conflict

logger = logging.getLogger(__name__)


class ValidationOrigin(str, Enum):
    HUMAN_FILE = "human-file"
    ORACLE = "oracle"
    ORACLE_RAG = "oracle-rag"


@dataclass(frozen=True, slots=True)
class ValidationEntry:
    cluster_id: str
    attribute: str
    value: Optional[str]
    origin: ValidationOrigin

    @property
    def key(self) -> Tuple[str, str]:
        return (self.cluster_id, self.attribute)


@dataclass
class FusionValidationSet:
    entries: List[ValidationEntry] = field(default_factory=list)

    def __post_init__(self) -> None:
        seen: set[Tuple[str, str]] = set()
        for entry in self.entries:
            if entry.key in seen:
                raise DatasetError(f"validation entry {entry.key} appears twice", [entry.key])
            seen.add(entry.key)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def cluster_ids(self) -> List[str]:
        return sorted({entry.cluster_id for entry in self.entries})

    def check_clusters(self, clusters: Iterable[EntityCluster]) -> None:
        known = {cluster.cluster_id for cluster in clusters}
        unknown = [cluster_id for cluster_id in self.cluster_ids if cluster_id not in known]
        if unknown:
            raise DatasetError(f"validation set names unknown clusters: {unknown[:5]}", unknown)


def _truth_text(value: Any) -> Optional[str]:
    if value is None:
        return None
    if isinstance(value, list):
        return json.dumps(value, ensure_ascii=False)
    return str(value)


def conflicting_attributes(
    cluster: EntityCluster, datasets: Mapping[str, Dataset], target: TargetSchema
) -> List[str]:
    members = cluster_records(cluster, datasets)
    return [
        attribute.name
        for attribute in target.fused_attributes
        if has_conflict(candidates_for(members, attribute.name))
    ]


def generate_validation_set(
    clusters: Sequence[EntityCluster],
    datasets: Sequence[Dataset],
    target: TargetSchema,
    oracle: Oracle,
    sample_size: int = 100,
    rag: bool = False,
    seed: int = 0,
) -> FusionValidationSet:
    """
    Two-step oracle ground truth for conflicting attributes.

    A seeded sample of multi-member clusters with conflicts goes to the oracle,
    which picks the entities it knows well; for each pick a second call returns
    the correct value of every conflicting attribute. ``rag`` routes the second
    step through the registered grounded transport.
    """

    if rag and not oracle.has_grounded:
        raise ConfigurationError(
            "search-grounded validation requested but no grounded oracle is registered"
        )
    by_name = {dataset.name: dataset for dataset in datasets}
    conflicted = [
        (cluster, attributes)
        for cluster in clusters
        if len(cluster) > 1
        for attributes in [conflicting_attributes(cluster, by_name, target)]
        if attributes
    ]
    if not conflicted:
        logger.warning("No multi-member clusters with conflicting values; validation set is empty")
        return FusionValidationSet()

    rng = np.random.default_rng(seed)
    if len(conflicted) > sample_size:
        picks = sorted(rng.choice(len(conflicted), size=sample_size, replace=False).tolist())
        conflicted = [conflicted[index] for index in picks]
    sampled = {cluster.cluster_id: (cluster, attributes) for cluster, attributes in conflicted}

    def members_payload(cluster: EntityCluster) -> List[Dict[str, Any]]:
        return [
            record_payload(dataset, record)
            for dataset, record in cluster_records(cluster, by_name)
        ]

    selection = oracle.invoke(
        build_request(
            TaskTag.FUSION_SELECT_ENTITIES,
            {
                "clusters": [
                    {"cluster_id": cluster.cluster_id, "members": members_payload(cluster)}
                    for cluster, _ in conflicted
                ]
            },
        )
    )
    assert isinstance(selection, SelectEntitiesReply)
    selected = [
        cluster_id for cluster_id in dict.fromkeys(selection.selected) if cluster_id in sampled
    ]
    logger.info("Oracle selected %d of %d sampled clusters", len(selected), len(sampled))

    tag = TaskTag.FUSION_GROUNDTRUTH_RAG if rag else TaskTag.FUSION_GROUNDTRUTH
    origin = ValidationOrigin.ORACLE_RAG if rag else ValidationOrigin.ORACLE
    requests = [
        build_request(
            tag,
            {
                "cluster_id": cluster_id,
                "attributes": sampled[cluster_id][1],
                "members": members_payload(sampled[cluster_id][0]),
            },
        )
        for cluster_id in selected
    ]
    entries: List[ValidationEntry] = []
    for cluster_id, reply in zip(selected, oracle.invoke_many(requests)):
        assert isinstance(reply, GroundTruthReply)
        wanted = set(sampled[cluster_id][1])
        seen: set[str] = set()
        for item in reply.values:
            if item.attribute not in wanted or item.attribute in seen:
                continue
            seen.add(item.attribute)
            entries.append(
                ValidationEntry(cluster_id, item.attribute, _truth_text(item.value), origin)
            )
    if not entries:
        logger.warning("Oracle returned no ground-truth values; validation set is empty")
    return FusionValidationSet(entries)


VALIDATION_COLUMNS = ["cluster_id", "attribute", "value", "origin"]


def save_validation_set(validation: FusionValidationSet, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(
        [
            (entry.cluster_id, entry.attribute, entry.value, entry.origin.value)
            for entry in validation
        ],
        columns=VALIDATION_COLUMNS,
    )
    frame.to_csv(path, index=False, encoding="utf-8")
    return path


def load_validation_set(path: Path | str) -> FusionValidationSet:
    """Read a validation file; rows without an origin are tagged ``human-file``."""

    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"validation set not found: {path}")
    frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    required = ("cluster_id", "attribute", "value")
    missing = [column for column in required if column not in frame.columns]
    if missing:
        raise DatasetError(f"validation file {path} lacks columns {missing}", missing)
    entries = [
        ValidationEntry(
            cluster_id=row["cluster_id"],
            attribute=row["attribute"],
            value=row["value"] if row["value"] != "" else None,
            origin=ValidationOrigin(row.get("origin") or ValidationOrigin.HUMAN_FILE.value),
        )
        for row in frame.to_dict("records")
    ]
    return FusionValidationSet(entries)
