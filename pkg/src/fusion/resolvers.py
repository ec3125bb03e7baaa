"""
Conflict-resolution functions that pick one value per attribute from a cluster.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date
from enum import Enum
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from src.datamodel import AttributeDescriptor, Dataset, TargetSchema, Value, ValueType, density
from src.datamodel.profiling import value_text
from src.errors import ConfigurationError


class ResolverName(str, Enum):
    VOTING = "voting"
    AVERAGE = "average"
    MEDIAN = "median"
    LONGEST_STRING = "longest_string"
    SHORTEST_STRING = "shortest_string"
    MOST_RECENT = "most_recent"
    SOURCE_PRIORITY = "source_priority"
    UNION_LIST = "union_list"
    FAVOUR_NON_NULL = "favour_non_null"


RESOLVER_DESCRIPTIONS: Dict[str, str] = {
    "voting": "most frequent value; ties go to the higher-priority source",
    "average": "arithmetic mean of numeric values",
    "median": "median of numeric values",
    "longest_string": "longest text value",
    "shortest_string": "shortest text value",
    "most_recent": "value from the source with the latest snapshot date",
    "source_priority": "first non-null value in a fixed source order",
    "union_list": "concatenation of all list items without duplicates",
    "favour_non_null": "non-null value from the most complete record",
}

_NUMERIC = {ValueType.NUMBER, ValueType.INTEGER, ValueType.DURATION}
_TEXT = {ValueType.STRING, ValueType.CATEGORICAL}

APPLICABLE_TYPES: Dict[ResolverName, Optional[set[ValueType]]] = {
    ResolverName.VOTING: None,
    ResolverName.AVERAGE: _NUMERIC,
    ResolverName.MEDIAN: _NUMERIC,
    ResolverName.LONGEST_STRING: _TEXT,
    ResolverName.SHORTEST_STRING: _TEXT,
    ResolverName.MOST_RECENT: None,
    ResolverName.SOURCE_PRIORITY: None,
    ResolverName.UNION_LIST: {ValueType.LIST},
    ResolverName.FAVOUR_NON_NULL: None,
}


@dataclass(frozen=True, slots=True)
class Candidate:
    """One member's value for an attribute."""

    value: Optional[Value]
    source: str
    record_id: str = ""
    completeness: int = 0


@dataclass(frozen=True, slots=True)
class Resolution:
    value: Optional[Value]
    sources: Tuple[str, ...] = ()


@dataclass(frozen=True)
class ResolverSpec:
    name: ResolverName
    parameters: Mapping[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        document: Dict[str, Any] = {"resolver": self.name.value}
        if self.parameters:
            document["parameters"] = dict(self.parameters)
        return document

    @classmethod
    def from_dict(cls, document: Mapping[str, Any]) -> "ResolverSpec":
        return cls(ResolverName(document["resolver"]), dict(document.get("parameters") or {}))

    def label(self) -> str:
        if self.name is ResolverName.SOURCE_PRIORITY and "order" in self.parameters:
            return f"{self.name.value}[{'>'.join(self.parameters['order'])}]"
        return self.name.value


@dataclass
class FusionContext:
    """Per-attribute source priority and per-source snapshot dates."""

    priority: Dict[str, List[str]] = field(default_factory=dict)
    snapshot_dates: Dict[str, date] = field(default_factory=dict)

    @classmethod
    def from_datasets(
        cls,
        datasets: Sequence[Dataset],
        target: TargetSchema,
        snapshot_dates: Optional[Mapping[str, date]] = None,
    ) -> "FusionContext":
        priority = {
            attribute.name: [
                dataset.name
                for dataset in sorted(
                    datasets, key=lambda item: (-density(item, [attribute.name]), item.name)
                )
            ]
            for attribute in target.fused_attributes
        }
        return cls(priority, dict(snapshot_dates or {}))

    def order(self, attribute: str) -> List[str]:
        return self.priority.get(attribute, [])

    @property
    def sources(self) -> List[str]:
        names = {name for order in self.priority.values() for name in order}
        return sorted(names | set(self.snapshot_dates))


def applicable(name: ResolverName, attribute: AttributeDescriptor, context: FusionContext) -> bool:
    allowed = APPLICABLE_TYPES[name]
    if allowed is not None and attribute.declared_type not in allowed:
        return False
    if name is ResolverName.MOST_RECENT and not context.snapshot_dates:
        return False
    return True


def check_applicable(
    spec: ResolverSpec, attribute: AttributeDescriptor, context: FusionContext
) -> None:
    if not applicable(spec.name, attribute, context):
        reason = (
            "no source snapshot dates are configured"
            if spec.name is ResolverName.MOST_RECENT and not context.snapshot_dates
            else f"it does not apply to {attribute.declared_type.value} values"
        )
        raise ConfigurationError(
            f"resolver {spec.name.value} cannot fuse {attribute.name}: {reason}"
        )


def value_key(value: Value) -> Any:
    if isinstance(value, list):
        return tuple(value)
    return value


def _rank(source: str, order: Sequence[str]) -> int:
    return order.index(source) if source in order else len(order)


def _sources_of(chosen: Any, candidates: Sequence[Candidate]) -> Tuple[str, ...]:
    return tuple(sorted({item.source for item in candidates if value_key(item.value) == chosen}))


def _voting(
    candidates: Sequence[Candidate], order: Sequence[str], spec: ResolverSpec
) -> Resolution:
    counts: Dict[Any, int] = {}
    best_rank: Dict[Any, int] = {}
    first: Dict[Any, Value] = {}
    for item in candidates:
        key = value_key(item.value)
        counts[key] = counts.get(key, 0) + 1
        rank = _rank(item.source, order)
        if key not in best_rank or rank < best_rank[key]:
            best_rank[key] = rank
            first[key] = item.value
    top = max(counts.values())
    tied = [key for key in counts if counts[key] == top]
    if spec.parameters.get("tie_break") == "longest":
        tied.sort(key=lambda key: (-len(value_text(first[key])), best_rank[key]))
    else:
        tied.sort(key=lambda key: best_rank[key])
    winner = tied[0]
    return Resolution(first[winner], _sources_of(winner, candidates))


def _numbers(candidates: Sequence[Candidate]) -> List[float]:
    numbers = []
    for item in candidates:
        if isinstance(item.value, bool):
            continue
        if isinstance(item.value, (int, float)):
            numbers.append(float(item.value))
            continue
        try:
            numbers.append(float(str(item.value)))
        except ValueError:
            continue
    return numbers


def _aggregate(reduce: Callable[[np.ndarray], float]):
    def resolve(
        candidates: Sequence[Candidate], order: Sequence[str], spec: ResolverSpec
    ) -> Resolution:
        numbers = _numbers(candidates)
        if not numbers:
            return Resolution(None)
        sources = tuple(sorted({item.source for item in candidates}))
        return Resolution(float(reduce(np.asarray(numbers))), sources)

    return resolve


def _by_length(longest: bool):
    def resolve(
        candidates: Sequence[Candidate], order: Sequence[str], spec: ResolverSpec
    ) -> Resolution:
        sign = -1 if longest else 1
        chosen = min(
            candidates,
            key=lambda item: (sign * len(value_text(item.value)), _rank(item.source, order)),
        )
        return Resolution(chosen.value, _sources_of(value_key(chosen.value), candidates))

    return resolve


def _most_recent(context: FusionContext):
    def resolve(
        candidates: Sequence[Candidate], order: Sequence[str], spec: ResolverSpec
    ) -> Resolution:
        def recency(item: Candidate) -> Tuple[int, int]:
            snapshot = context.snapshot_dates.get(item.source)
            return (-(snapshot.toordinal() if snapshot else 0), _rank(item.source, order))

        chosen = min(candidates, key=recency)
        return Resolution(chosen.value, (chosen.source,))

    return resolve


def _source_priority(
    candidates: Sequence[Candidate], order: Sequence[str], spec: ResolverSpec
) -> Resolution:
    ranking = list(spec.parameters.get("order") or order)
    chosen = min(candidates, key=lambda item: (_rank(item.source, ranking), item.record_id))
    return Resolution(chosen.value, (chosen.source,))


def _union_list(
    candidates: Sequence[Candidate], order: Sequence[str], spec: ResolverSpec
) -> Resolution:
    merged: List[str] = []
    seen: set[str] = set()
    for item in sorted(candidates, key=lambda c: _rank(c.source, order)):
        items = item.value if isinstance(item.value, list) else [value_text(item.value)]
        for entry in items:
            key = entry.strip().casefold()
            if key and key not in seen:
                seen.add(key)
                merged.append(entry.strip())
    return Resolution(merged, tuple(sorted({c.source for c in candidates})))


def _favour_non_null(
    candidates: Sequence[Candidate], order: Sequence[str], spec: ResolverSpec
) -> Resolution:
    chosen = min(candidates, key=lambda item: (-item.completeness, _rank(item.source, order)))
    return Resolution(chosen.value, (chosen.source,))


def resolve_conflict(
    candidates: Sequence[Candidate],
    spec: ResolverSpec,
    context: FusionContext,
    attribute: str,
) -> Resolution:
    """
    Fuse one attribute of one cluster.

    Nulls are dropped first; no remaining value gives a null result. A single
    distinct value is returned unchanged whatever the resolver.
    """

    present = [item for item in candidates if item.value is not None]
    if not present:
        return Resolution(None)
    distinct = {value_key(item.value) for item in present}
    if len(distinct) == 1:
        only = next(iter(distinct))
        return Resolution(present[0].value, _sources_of(only, present))

    order = context.order(attribute)
    resolvers = {
        ResolverName.VOTING: _voting,
        ResolverName.AVERAGE: _aggregate(np.mean),
        ResolverName.MEDIAN: _aggregate(np.median),
        ResolverName.LONGEST_STRING: _by_length(True),
        ResolverName.SHORTEST_STRING: _by_length(False),
        ResolverName.MOST_RECENT: _most_recent(context),
        ResolverName.SOURCE_PRIORITY: _source_priority,
        ResolverName.UNION_LIST: _union_list,
        ResolverName.FAVOUR_NON_NULL: _favour_non_null,
    }
    return resolvers[spec.name](present, order, spec)
