"""
Delimited-file and schema-document I/O for datasets.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from datetime import date
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import pandas as pd

from src.errors import DatasetError

from .models import (
    SYNTHESIZE_ID,
    SYNTHETIC_ID_ATTRIBUTE,
    AttributeDescriptor,
    Dataset,
    Record,
    TargetSchema,
    Value,
    ValueType,
)

logger = logging.getLogger(__name__)

NULL_MARKERS = frozenset({"", "null", "NULL", "NaN", "-"})


def clean_cell(raw: object) -> Optional[str]:
    """Map a raw cell to a stripped string, or None for null markers."""

    if not isinstance(raw, str):
        return None
    stripped = raw.strip()
    if stripped in NULL_MARKERS:
        return None
    return stripped


def _read_header(path: Path, delimiter: str) -> List[str]:
    try:
        header = pd.read_csv(
            path, sep=delimiter, header=None, nrows=1, dtype=str, keep_default_na=False
        )
    except pd.errors.EmptyDataError as exc:
        raise DatasetError(f"{path} has no header row") from exc
    return [str(name).strip() for name in header.iloc[0].tolist()]


def load_dataset(
    path: Path | str,
    id_attribute: str = SYNTHESIZE_ID,
    *,
    name: Optional[str] = None,
    delimiter: str = ",",
    schema: Optional[TargetSchema] = None,
) -> Dataset:
    """
    Load a delimiter-separated file with a header row.

    Empty cells and the null markers become None. With ``id_attribute =
    "synthesize"`` ids are minted as ``<dataset>-<row index>``. When a target
    schema is given, values of typed columns are coerced back from their
    serialized form.
    """

    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"dataset file not found: {path}")
    name = name or path.stem

    columns = _read_header(path, delimiter)
    duplicates = sorted(column for column, count in Counter(columns).items() if count > 1)
    if duplicates:
        raise DatasetError(f"duplicate header names in {path}", duplicates)

    try:
        frame = pd.read_csv(
            path,
            sep=delimiter,
            dtype=str,
            keep_default_na=False,
            na_filter=False,
            encoding="utf-8",
        )
    except pd.errors.ParserError as exc:
        raise DatasetError(f"malformed delimited file {path}: {exc}") from exc
    frame.columns = columns

    synthesize = id_attribute == SYNTHESIZE_ID
    if not synthesize and id_attribute not in columns:
        raise DatasetError(f"id attribute not in header of {path}", [id_attribute])

    types: Dict[str, ValueType] = {}
    if schema is not None:
        for column in columns:
            if column in schema.names:
                types[column] = schema.attribute(column).declared_type

    records: List[Record] = []
    seen: Counter[str] = Counter()
    for row_index, row in enumerate(frame.itertuples(index=False, name=None)):
        values: Dict[str, Optional[Value]] = {}
        for column, raw in zip(columns, row):
            cell = clean_cell(raw)
            if cell is not None and column in types:
                values[column] = coerce_value(cell, types[column])
            else:
                values[column] = cell
        if synthesize:
            record_id = f"{name}-{row_index}"
        else:
            record_id = values.get(id_attribute)
            if record_id is None:
                raise DatasetError(f"missing id in {path}", [f"row {row_index}"])
            record_id = str(record_id)
        seen[record_id] += 1
        records.append(Record(id=record_id, values=values, source=name))

    repeated = sorted(record_id for record_id, count in seen.items() if count > 1)
    if repeated:
        raise DatasetError(f"duplicate ids in {path}", repeated)

    attributes = tuple(
        AttributeDescriptor(name=column, declared_type=types.get(column, ValueType.STRING))
        for column in columns
    )
    dataset = Dataset(
        name=name,
        records=tuple(records),
        attributes=attributes,
        id_attribute=SYNTHETIC_ID_ATTRIBUTE if synthesize else id_attribute,
    )
    logger.debug("Loaded %s: %d rows, %d attributes", name, len(records), len(attributes))
    return dataset


def coerce_value(text: str, declared_type: ValueType) -> Value:
    """Read back a serialized value of a declared type; unreadable text stays a string."""

    try:
        if declared_type in (ValueType.NUMBER, ValueType.DURATION):
            return float(text)
        if declared_type is ValueType.INTEGER:
            number = float(text)
            return int(number) if number.is_integer() else number
        if declared_type is ValueType.DATE:
            return date.fromisoformat(text)
        if declared_type is ValueType.LIST and text.startswith("["):
            items = json.loads(text)
            if isinstance(items, list):
                return [str(item) for item in items if item is not None]
    except ValueError:
        return text
    return text


def format_value(value: Optional[Value]) -> str:
    """Serialize a cell value: ISO dates, JSON lists, shortest-repr numbers, empty nulls."""

    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return str(int(value)) if value.is_integer() and abs(value) < 1e15 else repr(value)
    if isinstance(value, date):
        return value.isoformat()
    if isinstance(value, list):
        return json.dumps(value, ensure_ascii=False)
    return str(value)


def write_dataset(dataset: Dataset, path: Path | str, delimiter: str = ",") -> Path:
    """Write a dataset; a synthesized id column is written first."""

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = dataset.attribute_names
    with_id = dataset.id_attribute not in columns
    header = ([dataset.id_attribute] if with_id else []) + columns
    rows = []
    for record in dataset.records:
        row = [format_value(record.values[column]) for column in columns]
        rows.append(([record.id] if with_id else []) + row)
    frame = pd.DataFrame(rows, columns=header, dtype=object)
    frame.to_csv(path, sep=delimiter, index=False, encoding="utf-8")
    return path


def load_target_schema(path: Path | str) -> TargetSchema:
    """Read ``{"id_attribute": ..., "attributes": [{name, type, description, value_set}]}``."""

    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"target schema not found: {path}")
    document = json.loads(path.read_text(encoding="utf-8"))
    try:
        attributes = tuple(
            AttributeDescriptor(
                name=entry["name"],
                declared_type=ValueType(entry.get("type", "string")),
                description=entry.get("description", ""),
                value_set=tuple(entry["value_set"]) if entry.get("value_set") else None,
            )
            for entry in document["attributes"]
        )
        return TargetSchema(attributes=attributes, id_attribute=document["id_attribute"])
    except (KeyError, ValueError) as exc:
        raise DatasetError(f"invalid target schema {path}: {exc}") from exc


def save_target_schema(schema: TargetSchema, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(schema.to_dict(), indent=2, ensure_ascii=False), encoding="utf-8")
    return path


def project(
    dataset: Dataset,
    renames: Dict[str, str],
    attributes: Sequence[AttributeDescriptor],
    id_attribute: str,
) -> Dataset:
    """
    Rename columns per ``renames`` (source -> target) and keep only ``attributes``.

    Records keep their ids; target attributes with no source column are null.
    """

    inverse = {target: source for source, target in renames.items()}
    records = []
    for record in dataset.records:
        values: Dict[str, Optional[Value]] = {}
        for attribute in attributes:
            source_column = inverse.get(attribute.name)
            values[attribute.name] = (
                record.values.get(source_column) if source_column is not None else None
            )
        if id_attribute in values:
            values[id_attribute] = record.id
        records.append(Record(id=record.id, values=values, source=dataset.name))
    return Dataset(
        name=dataset.name,
        records=tuple(records),
        attributes=tuple(attributes),
        id_attribute=id_attribute,
    )
