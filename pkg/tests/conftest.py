"""
Shared fixtures: a small games target schema, tiny source tables and a
mock-oracle factory. Nothing here reaches the network.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Callable, Dict, Iterable, Mapping, Optional, Sequence

import pandas as pd
import pytest

from src.datamodel import AttributeDescriptor, Dataset, Record, TargetSchema, ValueType
from src.oracle import HashedNgramEmbeddingClient, MockTables, MockTransport, Oracle, UsageLedger


def pytest_configure(config: pytest.Config) -> None:
    config.addinivalue_line("markers", "slow: full-size closed-loop runs")


@pytest.fixture
def games_schema() -> TargetSchema:
    return TargetSchema(
        attributes=(
            AttributeDescriptor("id"),
            AttributeDescriptor("name", ValueType.STRING, "Game title"),
            AttributeDescriptor(
                "platform", ValueType.CATEGORICAL, "Platform", ("PC", "PlayStation 4", "Xbox One")
            ),
            AttributeDescriptor("release_date", ValueType.DATE, "Release date"),
            AttributeDescriptor("genres", ValueType.LIST, "Genres"),
            AttributeDescriptor("sales", ValueType.NUMBER, "Units sold"),
        ),
        id_attribute="id",
    )


def make_dataset(
    name: str,
    rows: Sequence[Mapping[str, Any]],
    attributes: Optional[Iterable[str]] = None,
    *,
    types: Optional[Mapping[str, ValueType]] = None,
    id_attribute: str = "id",
) -> Dataset:
    """Build a dataset from dict rows; every row needs an ``id``."""

    names = list(attributes) if attributes is not None else [
        key for key in rows[0] if key != id_attribute
    ]
    types = types or {}
    records = tuple(
        Record(
            id=str(row[id_attribute]),
            values={column: row.get(column) for column in names},
            source=name,
        )
        for row in rows
    )
    return Dataset(
        name=name,
        records=records,
        attributes=tuple(
            AttributeDescriptor(column, types.get(column, ValueType.STRING)) for column in names
        ),
        id_attribute=id_attribute,
    )


@pytest.fixture
def dataset_factory() -> Callable[..., Dataset]:
    return make_dataset


@pytest.fixture
def write_csv(tmp_path: Path) -> Callable[[str, Sequence[Mapping[str, Any]]], Path]:
    def write(name: str, rows: Sequence[Mapping[str, Any]]) -> Path:
        path = tmp_path / name
        pd.DataFrame(list(rows), dtype=object).to_csv(path, index=False)
        return path

    return write


def make_oracle(
    tables: Optional[Mapping[str, Any]] = None,
    *,
    dimension: int = 64,
    budget_micro: Optional[int] = None,
    ledger: Optional[UsageLedger] = None,
    name_attribute: str = "name",
) -> Oracle:
    mock = MockTables.model_validate(dict(tables or {}))
    return Oracle(
        MockTransport(mock, name_attribute=name_attribute),
        HashedNgramEmbeddingClient(dimension),
        ledger=ledger,
        budget_micro=budget_micro,
        sleep=lambda seconds: None,
    )


@pytest.fixture
def oracle_factory() -> Callable[..., Oracle]:
    return make_oracle


@pytest.fixture
def shop_rows() -> list[Dict[str, Any]]:
    return [
        {"id": "s1", "name": "Silent Harbor Saga", "platform": "PC", "sales": "1.5 million"},
        {"id": "s2", "name": "Crimson Forge Legends", "platform": "PS4", "sales": "200 thousand"},
        {"id": "s3", "name": "Frozen Rift Origins", "platform": "XB1", "sales": None},
    ]
