"""
Core tabular data model.

Datasets are immutable after load. Every record carries a value slot for
every attribute of its dataset; a missing value is ``None``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from datetime import date
from enum import Enum
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

Value = Union[str, float, int, date, List[str]]

SYNTHESIZE_ID = "synthesize"
SYNTHETIC_ID_ATTRIBUTE = "_row_id"


class ValueType(str, Enum):
    """Declared attribute types of a schema."""

    STRING = "string"
    NUMBER = "number"
    INTEGER = "integer"
    DATE = "date"
    DURATION = "duration"
    LIST = "list"
    CATEGORICAL = "categorical"

    @property
    def is_numeric(self) -> bool:
        return self in (ValueType.NUMBER, ValueType.INTEGER, ValueType.DURATION)


class SemanticType(str, Enum):
    """Column types detected by profiling."""

    NUMBER = "number"
    DATE = "date"
    DURATION = "duration"
    COUNTRY = "country"
    STRING = "string"
    LIST = "list"
    CATEGORICAL = "categorical"


@dataclass(frozen=True, slots=True)
class AttributeDescriptor:
    """Name, type and documentation of one attribute."""

    name: str
    declared_type: ValueType = ValueType.STRING
    description: str = ""
    value_set: Optional[Tuple[str, ...]] = None

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("attribute name must be non-empty")
        if self.value_set is not None and self.declared_type is not ValueType.CATEGORICAL:
            raise ValueError(f"attribute {self.name} has a value set but is not categorical")

    def to_dict(self) -> Dict[str, object]:
        payload: Dict[str, object] = {
            "name": self.name,
            "type": self.declared_type.value,
            "description": self.description,
        }
        if self.value_set is not None:
            payload["value_set"] = list(self.value_set)
        return payload


def _check_unique_names(attributes: Sequence[AttributeDescriptor], owner: str) -> None:
    counts = Counter(attribute.name for attribute in attributes)
    duplicates = sorted(name for name, count in counts.items() if count > 1)
    if duplicates:
        raise ValueError(f"duplicate attribute names in {owner}: {', '.join(duplicates)}")


@dataclass(frozen=True, slots=True)
class TargetSchema:
    """The schema every source is integrated into."""

    attributes: Tuple[AttributeDescriptor, ...]
    id_attribute: str

    def __post_init__(self) -> None:
        _check_unique_names(self.attributes, "target schema")
        if self.id_attribute not in self.names:
            raise ValueError(f"id attribute {self.id_attribute} is not a target attribute")

    @property
    def names(self) -> List[str]:
        return [attribute.name for attribute in self.attributes]

    @property
    def fused_attributes(self) -> List[AttributeDescriptor]:
        """Every attribute except the id, in schema order."""

        return [attribute for attribute in self.attributes if attribute.name != self.id_attribute]

    def attribute(self, name: str) -> AttributeDescriptor:
        for attribute in self.attributes:
            if attribute.name == name:
                return attribute
        raise LookupError(f"unknown target attribute {name}")

    def to_dict(self) -> Dict[str, object]:
        return {
            "id_attribute": self.id_attribute,
            "attributes": [attribute.to_dict() for attribute in self.attributes],
        }


@dataclass(frozen=True, slots=True)
class Record:
    """One row of a dataset."""

    id: str
    values: Mapping[str, Optional[Value]]
    source: str

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("record id must be non-empty")

    def get(self, attribute: str) -> Optional[Value]:
        return self.values.get(attribute)

    @property
    def key(self) -> Tuple[str, str]:
        return (self.source, self.id)


@dataclass(frozen=True)
class Dataset:
    """A loaded source table with provenance-tagged records."""

    name: str
    records: Tuple[Record, ...]
    attributes: Tuple[AttributeDescriptor, ...]
    id_attribute: str
    _index: Dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        _check_unique_names(self.attributes, f"dataset {self.name}")
        index: Dict[str, int] = {}
        duplicates: List[str] = []
        names = self.attribute_names
        for position, record in enumerate(self.records):
            if record.id in index:
                duplicates.append(record.id)
            index[record.id] = position
            missing = [name for name in names if name not in record.values]
            if missing:
                raise ValueError(f"record {record.id} lacks attributes {', '.join(missing)}")
        if duplicates:
            from src.errors import DatasetError

            raise DatasetError(f"duplicate ids in dataset {self.name}", sorted(set(duplicates)))
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[Record]:
        return iter(self.records)

    @property
    def attribute_names(self) -> List[str]:
        return [attribute.name for attribute in self.attributes]

    def has_attribute(self, name: str) -> bool:
        return any(attribute.name == name for attribute in self.attributes)

    def attribute(self, name: str) -> AttributeDescriptor:
        for attribute in self.attributes:
            if attribute.name == name:
                return attribute
        raise LookupError(f"dataset {self.name} has no attribute {name}")

    def record(self, record_id: str) -> Record:
        try:
            return self.records[self._index[record_id]]
        except KeyError as exc:
            raise LookupError(f"dataset {self.name} has no record {record_id}") from exc

    def column(self, name: str) -> List[Optional[Value]]:
        if not self.has_attribute(name):
            raise LookupError(f"dataset {self.name} has no attribute {name}")
        return [record.values[name] for record in self.records]

    def with_records(
        self,
        records: Iterable[Record],
        attributes: Optional[Sequence[AttributeDescriptor]] = None,
        *,
        name: Optional[str] = None,
        id_attribute: Optional[str] = None,
    ) -> "Dataset":
        return Dataset(
            name=name or self.name,
            records=tuple(records),
            attributes=tuple(attributes if attributes is not None else self.attributes),
            id_attribute=id_attribute or self.id_attribute,
        )


@dataclass(frozen=True, slots=True)
class ColumnProfile:
    """Semantic type and value statistics of one column."""

    column: str
    detected_type: SemanticType
    unique_count: int
    null_fraction: float
    examples: Tuple[str, ...] = ()

    def to_dict(self) -> Dict[str, object]:
        return {
            "column": self.column,
            "detected_type": self.detected_type.value,
            "unique_count": self.unique_count,
            "null_fraction": self.null_fraction,
            "examples": list(self.examples),
        }


def density(dataset: Dataset, attribute_set: Sequence[str]) -> float:
    """
    Share of non-null cells over ``rows x |attribute_set|``.

    Attributes the dataset does not have count as all-null; an empty dataset
    has density 0.
    """

    if not attribute_set:
        raise ValueError("attribute_set must be non-empty")
    if len(dataset) == 0:
        return 0.0
    present = [name for name in attribute_set if dataset.has_attribute(name)]
    filled = 0
    for record in dataset.records:
        filled += sum(1 for name in present if record.values[name] is not None)
    return filled / (len(dataset) * len(attribute_set))
