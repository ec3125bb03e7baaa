"""
File layout of a run's output directory.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from src.errors import MissingArtifactError


def pair_stem(dataset_a: str, dataset_b: str) -> str:
    return f"{dataset_a}__{dataset_b}"


@dataclass(frozen=True)
class ArtifactLayout:
    root: Path

    @property
    def profiles(self) -> Path:
        return self.root / "profiles.json"

    @property
    def schema_correspondences(self) -> Path:
        return self.root / "correspondences.json"

    @property
    def schema_evaluation(self) -> Path:
        return self.root / "schema_evaluation.json"

    @property
    def mappings(self) -> Path:
        return self.root / "mappings"

    def mapping(self, dataset: str, column: str) -> Path:
        return self.mappings / f"{dataset}.{column}.json"

    @property
    def normalization_report(self) -> Path:
        return self.root / "normalization_report.json"

    @property
    def normalization_table(self) -> Path:
        return self.root / "normalization_report.txt"

    def projected(self, dataset: str) -> Path:
        return self.root / "projected" / f"{dataset}.csv"

    def pool(self, dataset_a: str, dataset_b: str) -> Path:
        return self.root / "pools" / f"{pair_stem(dataset_a, dataset_b)}.csv"

    def training(self, dataset_a: str, dataset_b: str) -> Path:
        return self.root / "training" / f"{pair_stem(dataset_a, dataset_b)}.csv"

    def model(self, dataset_a: str, dataset_b: str) -> Path:
        return self.root / "models" / f"{pair_stem(dataset_a, dataset_b)}.json"

    @property
    def record_correspondences(self) -> Path:
        return self.root / "correspondences_records.csv"

    @property
    def matching_evaluation(self) -> Path:
        return self.root / "matching_evaluation.json"

    @property
    def clusters(self) -> Path:
        return self.root / "clusters.txt"

    @property
    def validation_set(self) -> Path:
        return self.root / "validation_set.csv"

    @property
    def strategy(self) -> Path:
        return self.root / "strategy.json"

    @property
    def fused(self) -> Path:
        return self.root / "fused.csv"

    @property
    def provenance(self) -> Path:
        return self.root / "fused_provenance.csv"

    @property
    def fusion_evaluation(self) -> Path:
        return self.root / "fusion_evaluation.json"

    @property
    def report_json(self) -> Path:
        return self.root / "report.json"

    @property
    def report_text(self) -> Path:
        return self.root / "report.txt"

    @property
    def ledger(self) -> Path:
        return self.root / "ledger.jsonl"

    @property
    def timings(self) -> Path:
        return self.root / "timings.json"


def require(*paths: Path) -> None:
    """Raise for the first prerequisite artifact that does not exist."""

    for path in paths:
        if not path.exists():
            raise MissingArtifactError(path)
