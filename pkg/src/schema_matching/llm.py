"""
Oracle-based matcher: one structured request per source dataset.
"""

from __future__ import annotations

import logging
from collections import Counter
from typing import Any, Dict, List, Sequence

from src.datamodel import Dataset, TargetSchema
from src.datamodel.io import format_value
from src.datamodel.profiling import value_text
from src.oracle import Oracle, OracleRequest, SchemaMatchReply, TaskTag, build_request

from .models import MatcherKind, SchemaCorrespondence

logger = logging.getLogger(__name__)

NO_MATCH = "NONE"


def most_complete_rows(dataset: Dataset, count: int = 5) -> List[int]:
    """Indices of the ``count`` rows with the most non-null cells, ties by row order."""

    filled = [
        (sum(1 for value in record.values.values() if value is not None), index)
        for index, record in enumerate(dataset.records)
    ]
    ranked = sorted(filled, key=lambda item: (-item[0], item[1]))
    return [index for _, index in ranked[:count]]


def render_grid(dataset: Dataset, rows: Sequence[int]) -> str:
    """Plain-text pipe grid of the chosen rows."""

    columns = dataset.attribute_names

    def cell(text: str) -> str:
        return text.replace("|", "/").replace("\n", " ")

    lines = [
        "| " + " | ".join(cell(column) for column in columns) + " |",
        "|" + "|".join("---" for _ in columns) + "|",
    ]
    for index in rows:
        record = dataset.records[index]
        cells = [cell(format_value(record.values[column])) for column in columns]
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines)


def column_summary(dataset: Dataset, column: str, top: int = 5) -> Dict[str, Any]:
    counts = Counter(value_text(value) for value in dataset.column(column) if value is not None)
    return {
        "name": column,
        "unique_count": len(counts),
        "top_values": [value for value, _ in counts.most_common(top)],
    }


def schema_match_request(
    source: Dataset, target: TargetSchema, *, sample_rows: int = 5, summary_values: int = 5
) -> OracleRequest:
    fused = target.fused_attributes
    payload = {
        "dataset": source.name,
        "columns": source.attribute_names,
        "column_summaries": [
            column_summary(source, column, summary_values) for column in source.attribute_names
        ],
        "sample_grid": render_grid(source, most_complete_rows(source, sample_rows)),
        "target_schema": {"attributes": [attribute.to_dict() for attribute in fused]},
        "target_attributes": [attribute.name for attribute in fused],
    }
    return build_request(TaskTag.SCHEMA_MATCH, payload)


def parse_schema_reply(
    source: Dataset, target: TargetSchema, reply: SchemaMatchReply
) -> List[SchemaCorrespondence]:
    """Keep mapped columns only; unknown names and repeated targets are dropped."""

    columns = set(source.attribute_names)
    targets = {attribute.name for attribute in target.fused_attributes}
    seen_columns: set[str] = set()
    seen_targets: set[str] = set()
    correspondences = []
    for entry in reply.correspondences:
        attribute = entry.target_attribute
        if attribute is None or attribute == NO_MATCH:
            continue
        if entry.source_column not in columns or attribute not in targets:
            logger.warning(
                "Ignoring oracle correspondence %s -> %s for %s",
                entry.source_column,
                attribute,
                source.name,
            )
            continue
        if entry.source_column in seen_columns or attribute in seen_targets:
            continue
        seen_columns.add(entry.source_column)
        seen_targets.add(attribute)
        correspondences.append(
            SchemaCorrespondence(
                dataset=source.name,
                source_attribute=entry.source_column,
                target_attribute=attribute,
                score=1.0,
                matcher=MatcherKind.ORACLE,
            )
        )
    return correspondences


def match_with_oracle(
    source: Dataset,
    target: TargetSchema,
    oracle: Oracle,
    *,
    sample_rows: int = 5,
    summary_values: int = 5,
) -> List[SchemaCorrespondence]:
    if not source.attribute_names:
        return []
    request = schema_match_request(
        source, target, sample_rows=sample_rows, summary_values=summary_values
    )
    reply = oracle.invoke(request)
    return parse_schema_reply(source, target, reply)  # type: ignore[arg-type]


def match_all_with_oracle(
    sources: Sequence[Dataset],
    target: TargetSchema,
    oracle: Oracle,
    *,
    sample_rows: int = 5,
    summary_values: int = 5,
) -> List[SchemaCorrespondence]:
    """One request per source, issued concurrently through the oracle pool."""

    populated = [source for source in sources if source.attribute_names]
    requests = [
        schema_match_request(source, target, sample_rows=sample_rows, summary_values=summary_values)
        for source in populated
    ]
    correspondences: List[SchemaCorrespondence] = []
    for source, reply in zip(populated, oracle.invoke_many(requests)):
        correspondences.extend(parse_schema_reply(source, target, reply))  # type: ignore[arg-type]
    return correspondences
