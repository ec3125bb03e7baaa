"""
Entity clusters from one-to-one record correspondences.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple

from src.blocking import RecordRef
from src.datamodel import Dataset
from src.errors import ClusterIntegrityError
from src.matching import RecordCorrespondence

logger = logging.getLogger(__name__)

Member = Tuple[str, str]


class DisjointSet:
    """Union by size with path compression; each root tracks its datasets."""

    def __init__(self, members: Iterable[Member]) -> None:
        self.parent: Dict[Member, Member] = {}
        self.size: Dict[Member, int] = {}
        self.datasets: Dict[Member, set[str]] = {}
        for member in members:
            self.parent[member] = member
            self.size[member] = 1
            self.datasets[member] = {member[0]}

    def find(self, member: Member) -> Member:
        root = member
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[member] != root:
            self.parent[member], member = root, self.parent[member]
        return root

    def can_union(self, left: Member, right: Member) -> bool:
        a, b = self.find(left), self.find(right)
        return a == b or not (self.datasets[a] & self.datasets[b])

    def union(self, left: Member, right: Member) -> Member:
        a, b = self.find(left), self.find(right)
        if a == b:
            return a
        if self.size[a] < self.size[b]:
            a, b = b, a
        self.parent[b] = a
        self.size[a] += self.size.pop(b)
        self.datasets[a] |= self.datasets.pop(b)
        return a

    def groups(self) -> List[List[Member]]:
        grouped: Dict[Member, List[Member]] = {}
        for member in self.parent:
            grouped.setdefault(self.find(member), []).append(member)
        return list(grouped.values())


@dataclass
class EntityCluster:
    cluster_id: str
    members: List[Member]
    pair_scores: List[Tuple[Member, Member, float]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.members)

    @property
    def datasets(self) -> List[str]:
        return [dataset for dataset, _ in self.members]

    def member_of(self, dataset: str) -> str | None:
        for member_dataset, record_id in self.members:
            if member_dataset == dataset:
                return record_id
        return None


def member_token(member: Member) -> str:
    return f"{member[0]}:{member[1]}"


def parse_token(token: str) -> Member:
    dataset, _, record_id = token.partition(":")
    if not record_id:
        raise ValueError(f"malformed member token {token!r}")
    return (dataset, record_id)


def _member(ref: RecordRef) -> Member:
    return (ref.dataset, ref.id)


def build_clusters(
    correspondences: Sequence[RecordCorrespondence], datasets: Sequence[Dataset]
) -> List[EntityCluster]:
    """
    Connected components over the correspondences; unmatched records are singletons.

    Unions run in descending score order and skip any union that would put two
    records of one dataset into the same component. Clusters are numbered by
    their smallest member.
    """

    forest = DisjointSet((dataset.name, record.id) for dataset in datasets for record in dataset)
    retained: List[RecordCorrespondence] = []
    rejected = 0
    ordered = sorted(
        correspondences,
        key=lambda item: (-item.score, _member(item.record_a), _member(item.record_b)),
    )
    for item in ordered:
        left, right = _member(item.record_a), _member(item.record_b)
        if left not in forest.parent or right not in forest.parent:
            raise LookupError(f"correspondence names unknown records: {left}, {right}")
        if not forest.can_union(left, right):
            rejected += 1
            continue
        forest.union(left, right)
        retained.append(item)
    if rejected:
        logger.warning("Rejected %d correspondences that would merge same-source records", rejected)

    scores: Dict[Member, List[Tuple[Member, Member, float]]] = {}
    for item in retained:
        left, right = _member(item.record_a), _member(item.record_b)
        scores.setdefault(forest.find(left), []).append((left, right, item.score))

    groups = sorted((sorted(group), forest.find(group[0])) for group in forest.groups())
    clusters = [
        EntityCluster(f"cluster-{index}", members, scores.get(root, []))
        for index, (members, root) in enumerate(groups, start=1)
    ]
    check_clusters(clusters)
    histogram = size_histogram(clusters)
    logger.info(
        "Built %d clusters (%s)",
        len(clusters),
        ", ".join(f"{count} of size {size}" for size, count in sorted(histogram.items())),
    )
    return clusters


def check_clusters(clusters: Iterable[EntityCluster]) -> None:
    for cluster in clusters:
        datasets = cluster.datasets
        if len(set(datasets)) != len(datasets):
            raise ClusterIntegrityError(
                f"{cluster.cluster_id} holds two records of one dataset: {cluster.members}"
            )


def size_histogram(clusters: Iterable[EntityCluster]) -> Dict[int, int]:
    return dict(Counter(len(cluster) for cluster in clusters))


def save_clusters(clusters: Iterable[EntityCluster], path: Path | str) -> Path:
    """One JSON line per cluster: id, member tokens and retained pair scores."""

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as handle:
        for cluster in clusters:
            line = {
                "cluster_id": cluster.cluster_id,
                "members": [member_token(member) for member in cluster.members],
                "scores": [
                    [member_token(left), member_token(right), score]
                    for left, right, score in cluster.pair_scores
                ],
            }
            handle.write(json.dumps(line, ensure_ascii=False) + "\n")
    return path


def load_clusters(path: Path | str) -> List[EntityCluster]:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"cluster file not found: {path}")
    clusters: List[EntityCluster] = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        document = json.loads(line)
        clusters.append(
            EntityCluster(
                cluster_id=document["cluster_id"],
                members=[parse_token(token) for token in document["members"]],
                pair_scores=[
                    (parse_token(left), parse_token(right), float(score))
                    for left, right, score in document["scores"]
                ],
            )
        )
    check_clusters(clusters)
    return clusters
