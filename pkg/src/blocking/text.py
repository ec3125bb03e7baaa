"""
Utilities that build textual representations of records for embeddings.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence

from src.datamodel import Dataset, Record
from src.datamodel.profiling import value_text


@dataclass
class RecordText:
    record_id: str
    dataset: str
    text: str


class RecordTextBuilder:
    """Renders records as ``attribute: value`` lines in template order, nulls omitted."""

    def __init__(self, template: Sequence[str]) -> None:
        self.template = list(template)

    @classmethod
    def for_dataset(
        cls, dataset: Dataset, template: Optional[Sequence[str]] = None
    ) -> "RecordTextBuilder":
        if template is None:
            template = [name for name in dataset.attribute_names if name != dataset.id_attribute]
        unknown = [name for name in template if not dataset.has_attribute(name)]
        if unknown:
            raise LookupError(f"template names unknown attributes of {dataset.name}: {unknown}")
        return cls(template)

    def render(self, record: Record) -> str:
        lines: List[str] = []
        for attribute in self.template:
            value = record.values.get(attribute)
            if value is None:
                continue
            lines.append(f"{attribute}: {value_text(value)}")
        return "\n".join(lines)

    def iter_texts(self, dataset: Dataset) -> Iterator[RecordText]:
        for record in dataset.records:
            yield RecordText(record_id=record.id, dataset=dataset.name, text=self.render(record))
