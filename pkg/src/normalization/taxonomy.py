"""
Oracle-generated taxonomy mappings for categorical target attributes.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional

from src.datamodel import AttributeDescriptor, Dataset
from src.datamodel.profiling import value_text
from src.oracle import Oracle, TaskTag, TaxonomyReply, build_request

logger = logging.getLogger(__name__)

RETAIN = None
DEFAULT_BATCH_SIZE = 200


@dataclass
class TaxonomyMapping:
    """Raw value to value-set member; ``None`` (RETAIN) keeps the raw value."""

    dataset: str
    column: str
    attribute: str
    entries: Dict[str, Optional[str]] = field(default_factory=dict)

    def apply(self, raw: str) -> Optional[str]:
        return self.entries.get(raw, RETAIN)

    def to_dict(self) -> Dict[str, object]:
        return {
            "dataset": self.dataset,
            "column": self.column,
            "attribute": self.attribute,
            "entries": dict(sorted(self.entries.items())),
        }

    @classmethod
    def from_dict(cls, document: Mapping[str, object]) -> "TaxonomyMapping":
        return cls(
            dataset=str(document["dataset"]),
            column=str(document["column"]),
            attribute=str(document["attribute"]),
            entries=dict(document.get("entries", {})),  # type: ignore[arg-type]
        )

    def save(self, directory: Path | str) -> Path:
        path = Path(directory) / f"{self.dataset}.{self.column}.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n", "utf-8")
        return path

    @classmethod
    def load(cls, path: Path | str) -> "TaxonomyMapping":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def distinct_values(dataset: Dataset, column: str) -> List[str]:
    """Sorted distinct non-null values, so mappings do not depend on record order."""

    return sorted({value_text(value) for value in dataset.column(column) if value is not None})


def map_taxonomy(
    dataset: Dataset,
    column: str,
    target_attribute: AttributeDescriptor,
    oracle: Oracle,
    *,
    batch_size: int = DEFAULT_BATCH_SIZE,
    overrides: Optional[TaxonomyMapping] = None,
) -> TaxonomyMapping:
    """
    Map every observed value of ``column`` onto the attribute's value set.

    Values already in the value set map to themselves; entries of
    ``overrides`` win over oracle replies; everything else is asked in
    batches. Replies outside the value set are retained with a warning.
    """

    if not target_attribute.value_set:
        raise ValueError(f"target attribute {target_attribute.name} has no value set")
    value_set = list(target_attribute.value_set)
    members = set(value_set)
    mapping = TaxonomyMapping(dataset.name, column, target_attribute.name)
    pending: List[str] = []
    for value in distinct_values(dataset, column):
        if overrides is not None and value in overrides.entries:
            mapping.entries[value] = overrides.entries[value]
        elif value in members:
            mapping.entries[value] = value
        else:
            pending.append(value)

    requests = [
        build_request(
            TaskTag.TAXONOMY_MAP,
            {
                "attribute": target_attribute.name,
                "description": target_attribute.description,
                "value_set": value_set,
                "values": pending[start : start + batch_size],
            },
        )
        for start in range(0, len(pending), batch_size)
    ]
    answered: Dict[str, Optional[str]] = {}
    for reply in oracle.invoke_many(requests):
        assert isinstance(reply, TaxonomyReply)
        for entry in reply.mappings:
            answered[entry.value] = entry.target
    for value in pending:
        target = answered.get(value, RETAIN)
        if target is not RETAIN and target not in members:
            logger.warning(
                "Taxonomy reply for %s.%s maps %r outside the value set (%r); retaining",
                dataset.name,
                column,
                value,
                target,
            )
            target = RETAIN
        mapping.entries[value] = target
    logger.debug(
        "Mapped %d values of %s.%s (%d asked)",
        len(mapping.entries),
        dataset.name,
        column,
        len(pending),
    )
    return mapping
