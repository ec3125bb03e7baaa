"""
Normalizer selection from column profiles and schema correspondences.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from src.datamodel import ColumnProfile, SemanticType, TargetSchema, ValueType
from src.schema_matching import SchemaCorrespondence

from .normalizers import NormalizerKind


class NormalizationMethod(str, Enum):
    CODE = "code"
    TAXONOMY = "taxonomy"


@dataclass(frozen=True, slots=True)
class NormalizerAssignment:
    dataset: str
    column: str
    normalizer: NormalizerKind
    target_type: Optional[ValueType]
    method: NormalizationMethod = NormalizationMethod.CODE
    target_attribute: Optional[str] = None

    @property
    def touches(self) -> bool:
        return (
            self.method is NormalizationMethod.TAXONOMY
            or self.normalizer is not NormalizerKind.NONE
        )

    def to_dict(self) -> Dict[str, object]:
        return {
            "dataset": self.dataset,
            "column": self.column,
            "normalizer": self.normalizer.value,
            "target_type": self.target_type.value if self.target_type else None,
            "method": self.method.value,
            "target_attribute": self.target_attribute,
        }


_BY_DECLARED_TYPE = {
    ValueType.NUMBER: NormalizerKind.NUMERIC_SCALE,
    ValueType.INTEGER: NormalizerKind.NUMERIC_SCALE,
    ValueType.DATE: NormalizerKind.DATE,
    ValueType.DURATION: NormalizerKind.DURATION,
    ValueType.LIST: NormalizerKind.LIST_SPLIT,
}

_PHONE_HINTS = ("phone", "tel", "fax", "mobile")


def choose_normalizer(
    profile: ColumnProfile, declared_type: ValueType, attribute_name: str
) -> NormalizerKind:
    """
    Typed target attributes pick their normalizer by declared type; string
    targets are normalized only when they hold countries or phone numbers.
    """

    if declared_type in _BY_DECLARED_TYPE:
        return _BY_DECLARED_TYPE[declared_type]
    if profile.detected_type is SemanticType.COUNTRY:
        return NormalizerKind.COUNTRY
    if any(hint in attribute_name.lower() for hint in _PHONE_HINTS):
        return NormalizerKind.PHONE
    return NormalizerKind.NONE


def assign_normalizers(
    profiles: Mapping[str, Sequence[ColumnProfile]],
    correspondences: Iterable[SchemaCorrespondence],
    target: TargetSchema,
) -> List[NormalizerAssignment]:
    """One assignment per profiled column; ``profiles`` is keyed by dataset name."""

    mapped: Dict[Tuple[str, str], str] = {
        (correspondence.dataset, correspondence.source_attribute): correspondence.target_attribute
        for correspondence in correspondences
        if correspondence.target_attribute is not None
    }
    assignments: List[NormalizerAssignment] = []
    for dataset, dataset_profiles in profiles.items():
        for profile in dataset_profiles:
            attribute_name = mapped.get((dataset, profile.column))
            if attribute_name is None or attribute_name == target.id_attribute:
                assignments.append(
                    NormalizerAssignment(dataset, profile.column, NormalizerKind.NONE, None)
                )
                continue
            attribute = target.attribute(attribute_name)
            if attribute.value_set:
                assignments.append(
                    NormalizerAssignment(
                        dataset,
                        profile.column,
                        NormalizerKind.NONE,
                        attribute.declared_type,
                        NormalizationMethod.TAXONOMY,
                        attribute_name,
                    )
                )
                continue
            assignments.append(
                NormalizerAssignment(
                    dataset,
                    profile.column,
                    choose_normalizer(profile, attribute.declared_type, attribute_name),
                    attribute.declared_type,
                    NormalizationMethod.CODE,
                    attribute_name,
                )
            )
    return assignments
