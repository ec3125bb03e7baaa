"""
Fusion of entity clusters into target-schema records with provenance.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import pandas as pd

from src.clustering import EntityCluster, member_token, size_histogram
from src.datamodel import Dataset, Record, TargetSchema, Value

from .equality import values_equal
from .resolvers import (
    Candidate,
    FusionContext,
    Resolution,
    ResolverSpec,
    resolve_conflict,
    value_key,
)

logger = logging.getLogger(__name__)

FUSED_DATASET = "fused"


def cluster_records(
    cluster: EntityCluster, datasets: Mapping[str, Dataset]
) -> List[Tuple[str, Record]]:
    return [
        (dataset, datasets[dataset].record(record_id)) for dataset, record_id in cluster.members
    ]


def candidates_for(members: Sequence[Tuple[str, Record]], attribute: str) -> List[Candidate]:
    return [
        Candidate(
            value=record.values.get(attribute),
            source=dataset,
            record_id=record.id,
            completeness=sum(1 for value in record.values.values() if value is not None),
        )
        for dataset, record in members
    ]


def has_conflict(candidates: Iterable[Candidate]) -> bool:
    """Two or more distinct non-null inputs."""

    return len({value_key(item.value) for item in candidates if item.value is not None}) >= 2


def fuse_attribute(
    members: Sequence[Tuple[str, Record]],
    attribute: str,
    spec: ResolverSpec,
    context: FusionContext,
) -> Tuple[Resolution, bool]:
    candidates = candidates_for(members, attribute)
    return resolve_conflict(candidates, spec, context, attribute), has_conflict(candidates)


@dataclass(frozen=True, slots=True)
class ProvenanceRow:
    fused_id: str
    attribute: str
    sources: Tuple[str, ...]
    resolver: str
    conflict: bool


@dataclass
class FusionStats:
    clusters: int
    non_singleton: int
    input_records: int
    histogram: Dict[int, int] = field(default_factory=dict)
    conflicts: int = 0

    def to_dict(self) -> Dict[str, object]:
        return {
            "clusters": self.clusters,
            "non_singleton": self.non_singleton,
            "input_records": self.input_records,
            "histogram": {str(size): count for size, count in sorted(self.histogram.items())},
            "conflicts": self.conflicts,
        }


@dataclass
class FusionResult:
    dataset: Dataset
    provenance: List[ProvenanceRow]
    stats: FusionStats


def fuse(
    clusters: Sequence[EntityCluster],
    strategy: Mapping[str, ResolverSpec],
    datasets: Sequence[Dataset],
    target: TargetSchema,
    context: FusionContext,
) -> FusionResult:
    """
    One fused record per cluster, keyed by the cluster id.

    Singleton clusters pass through with their projected values. The provenance
    sidecar records the contributing sources, the resolver and the conflict flag
    for every fused attribute.
    """

    by_name = {dataset.name: dataset for dataset in datasets}
    records: List[Record] = []
    provenance: List[ProvenanceRow] = []
    conflicts = 0
    for cluster in clusters:
        members = cluster_records(cluster, by_name)
        values: Dict[str, Optional[Value]] = {target.id_attribute: cluster.cluster_id}
        for attribute in target.fused_attributes:
            spec = strategy[attribute.name]
            resolution, conflict = fuse_attribute(members, attribute.name, spec, context)
            values[attribute.name] = resolution.value
            conflicts += conflict
            provenance.append(
                ProvenanceRow(
                    cluster.cluster_id, attribute.name, resolution.sources, spec.label(), conflict
                )
            )
        records.append(Record(id=cluster.cluster_id, values=values, source=FUSED_DATASET))

    fused = Dataset(
        name=FUSED_DATASET,
        records=tuple(records),
        attributes=tuple(target.attributes),
        id_attribute=target.id_attribute,
    )
    stats = FusionStats(
        clusters=len(clusters),
        non_singleton=sum(1 for cluster in clusters if len(cluster) > 1),
        input_records=sum(len(cluster) for cluster in clusters),
        histogram=size_histogram(clusters),
        conflicts=conflicts,
    )
    logger.info(
        "Fused %d input records into %d records (%d conflicting values)",
        stats.input_records,
        stats.clusters,
        conflicts,
    )
    return FusionResult(fused, provenance, stats)


PROVENANCE_COLUMNS = ["fused_id", "attribute", "sources", "resolver", "conflict"]


def save_provenance(rows: Iterable[ProvenanceRow], path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(
        [
            (row.fused_id, row.attribute, ";".join(row.sources), row.resolver, row.conflict)
            for row in rows
        ],
        columns=PROVENANCE_COLUMNS,
    )
    frame.to_csv(path, index=False, encoding="utf-8")
    return path


def fusion_accuracy_by_entity(
    fused: Dataset,
    clusters: Sequence[EntityCluster],
    target: TargetSchema,
    entities: Mapping[str, str],
    entity_values: Mapping[str, Mapping[str, Optional[Value]]],
) -> float:
    """
    Share of (fused record, attribute) truth entries the fused values get right.

    ``entities`` maps ``dataset:id`` tokens to entity keys; a fused record is
    scored against the entity of its first known member.
    """

    correct = total = 0
    for cluster in clusters:
        entity = next(
            (
                entities[member_token(member)]
                for member in cluster.members
                if member_token(member) in entities
            ),
            None,
        )
        truth = entity_values.get(entity, {}) if entity is not None else {}
        if not truth:
            continue
        record = fused.record(cluster.cluster_id)
        for attribute in target.fused_attributes:
            if attribute.name not in truth:
                continue
            total += 1
            correct += values_equal(
                record.values.get(attribute.name), truth[attribute.name], attribute.declared_type
            )
    return correct / total if total else 0.0
