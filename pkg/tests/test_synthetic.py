from __future__ import annotations

import json

import pandas as pd
import pytest

from src.config import load_run_config
from src.datamodel import load_target_schema
from src.synthetic import LAYOUTS, generate_benchmark, target_schema
from src.synthetic.__main__ import main


def read_source(path):
    return pd.read_csv(path, dtype=str, keep_default_na=False)


def test_every_source_has_the_requested_size(tmp_path) -> None:
    files = generate_benchmark(tmp_path, records_per_source=10, seed=3)

    assert files.entities == 16
    assert sorted(files.sources) == ["catalog", "shop", "wiki"]
    for layout in LAYOUTS:
        frame = read_source(files.sources[layout.name])
        assert len(frame) == 10
        assert list(frame.columns) == [layout.id_column, *layout.columns.values()]
        assert frame[layout.id_column].is_unique
    catalog = read_source(files.sources["catalog"])
    assert set(catalog.columns) == {f"Attribute_{index}" for index in range(1, 8)}


def test_mock_tables_cover_every_record(tmp_path) -> None:
    files = generate_benchmark(tmp_path, records_per_source=10, seed=3)
    tables = json.loads(files.mock_tables.read_text(encoding="utf-8"))
    held_out = json.loads(files.fusion_test.read_text(encoding="utf-8"))

    assert len(tables["entities"]) == 30
    assert tables["synonyms"]["shop.title"] == "name"
    assert tables["taxonomy"]["platform"]["XB1"] == "Xbox One"
    assert not set(tables["well_known"]) & set(held_out["entity_values"])
    assert set(tables["well_known"]) | set(held_out["entity_values"]) <= set(
        tables["entity_values"]
    )


def test_generated_config_and_schema_load(tmp_path) -> None:
    files = generate_benchmark(tmp_path, records_per_source=10, seed=3)

    config = load_run_config(files.config)

    assert [source.dataset_name for source in config.sources] == ["shop", "wiki", "catalog"]
    assert config.output_dir == (tmp_path / "out").resolve()
    assert load_target_schema(files.target_schema) == target_schema()
    assert sorted(path.name for path in files.gold_test.iterdir()) == [
        "catalog__shop.csv",
        "catalog__wiki.csv",
        "shop__wiki.csv",
    ]


def test_same_seed_writes_identical_sources(tmp_path) -> None:
    first = generate_benchmark(tmp_path / "a", records_per_source=12, seed=11)
    second = generate_benchmark(tmp_path / "b", records_per_source=12, seed=11)
    other = generate_benchmark(tmp_path / "c", records_per_source=12, seed=12)

    for name, path in first.sources.items():
        assert path.read_bytes() == second.sources[name].read_bytes()
    assert first.sources["shop"].read_bytes() != other.sources["shop"].read_bytes()


@pytest.mark.parametrize("records", [0, 4, 10_000])
def test_rejects_unsupported_sizes(tmp_path, records) -> None:
    with pytest.raises(ValueError):
        generate_benchmark(tmp_path, records_per_source=records)


def test_command_line(tmp_path, capsys) -> None:
    assert main(["--out", str(tmp_path / "bench"), "--records", "10"]) == 0
    assert "Benchmark complete: 16 entities" in capsys.readouterr().out
    assert main(["--out", str(tmp_path / "bad"), "--records", "3"]) == 1
