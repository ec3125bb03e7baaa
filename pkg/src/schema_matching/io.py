"""
Correspondence files and projection of sources onto the target schema.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Dict, Iterable, List, Sequence

from src.datamodel import Dataset, TargetSchema, project

from .models import SchemaCorrespondence


def save_correspondences(correspondences: Iterable[SchemaCorrespondence], path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    documents = [correspondence.to_dict() for correspondence in correspondences]
    path.write_text(json.dumps(documents, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    return path


def load_correspondences(path: Path | str) -> List[SchemaCorrespondence]:
    """Read correspondences; gold files may omit score and matcher."""

    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"correspondence file not found: {path}")
    return [
        SchemaCorrespondence.from_dict(document)
        for document in json.loads(path.read_text(encoding="utf-8"))
    ]


def renames_for(dataset: str, correspondences: Iterable[SchemaCorrespondence]) -> Dict[str, str]:
    return {
        correspondence.source_attribute: correspondence.target_attribute
        for correspondence in correspondences
        if correspondence.dataset == dataset and correspondence.target_attribute is not None
    }


def project_to_target(
    dataset: Dataset,
    correspondences: Iterable[SchemaCorrespondence],
    target: TargetSchema,
) -> Dataset:
    """Rename mapped columns to target attributes; unmapped ones are dropped."""

    return project(
        dataset,
        renames_for(dataset.name, correspondences),
        target.attributes,
        target.id_attribute,
    )


def shared_target_attributes(
    correspondences: Sequence[SchemaCorrespondence],
    dataset_a: str,
    dataset_b: str,
    target: TargetSchema,
) -> List[str]:
    """Non-id target attributes mapped in both datasets, in target order."""

    mapped_a = set(renames_for(dataset_a, correspondences).values())
    mapped_b = set(renames_for(dataset_b, correspondences).values())
    return [
        attribute.name
        for attribute in target.fused_attributes
        if attribute.name in mapped_a and attribute.name in mapped_b
    ]
