from __future__ import annotations

import json
from pathlib import Path

import pytest

from src.config import load_run_config
from src.pipeline import STEPS, ArtifactLayout, IntegrationPipeline, StepTimer, artifact_lines
from src.pipeline.__main__ import (
    EXIT_BUDGET,
    EXIT_INVALID,
    EXIT_MISSING_ARTIFACT,
    EXIT_OK,
    main,
)
from src.synthetic import generate_benchmark


def small_benchmark(root: Path, *, records: int = 100, **overrides) -> Path:
    """A benchmark sized for quick runs, with matching parameters scaled down."""

    files = generate_benchmark(root, records_per_source=records, seed=5)
    document = json.loads(files.config.read_text(encoding="utf-8"))
    document["oracle"]["embedding_dimension"] = 128
    document["matching"].update(
        {
            "seed_target": 20,
            "batch_size": 20,
            "target_size": 100,
            "validation_size": 100,
            "search_budget": 2,
        }
    )
    document["fusion"]["sample_size"] = 40
    for section, values in overrides.items():
        document.setdefault(section, {}).update(values)
    files.config.write_text(json.dumps(document, indent=2), encoding="utf-8")
    return files.config


@pytest.fixture
def benchmark_config(tmp_path) -> Path:
    return small_benchmark(tmp_path / "bench")


def test_full_run_writes_every_artifact(benchmark_config, tmp_path, capsys) -> None:
    out = tmp_path / "run"

    code = main(["--config", str(benchmark_config), "--out", str(out)])

    assert code == EXIT_OK
    printed = capsys.readouterr().out
    assert f"Integration complete: {len(STEPS)} step(s)" in printed
    layout = ArtifactLayout(out)
    for path in (
        layout.profiles,
        layout.schema_correspondences,
        layout.normalization_report,
        layout.projected("shop"),
        layout.pool("catalog", "shop"),
        layout.record_correspondences,
        layout.clusters,
        layout.strategy,
        layout.fused,
        layout.provenance,
        layout.report_json,
        layout.report_text,
        layout.ledger,
    ):
        assert path.is_file(), path
    report = json.loads(layout.report_json.read_text(encoding="utf-8"))
    assert report["data_sources"] == 3
    assert report["total_input_records"] == 300
    assert report["largest_input"] == 100
    assert report["fused_groups"] <= report["output_records"]
    assert "Fusion Ratio" in layout.report_text.read_text(encoding="utf-8")


def test_runs_are_deterministic(benchmark_config, tmp_path) -> None:
    first, second = tmp_path / "first", tmp_path / "second"

    assert main(["--config", str(benchmark_config), "--out", str(first)]) == EXIT_OK
    assert main(["--config", str(benchmark_config), "--out", str(second)]) == EXIT_OK

    for name in ("correspondences_records.csv", "clusters.txt", "fused.csv"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_stepwise_runs_resume_from_artifacts(benchmark_config, tmp_path) -> None:
    config = load_run_config(benchmark_config)
    config.output_dir = tmp_path / "steps"

    results = [IntegrationPipeline(config).run(step)[0] for step in ("profile", "match-schema")]

    assert [result.step for result in results] == ["profile", "match-schema"]
    assert "macro F1 1.000" in results[1].summary
    lines = artifact_lines(results)
    assert lines[0].startswith("[profile] 3 sources, 300 records")
    timings = StepTimer.load(ArtifactLayout(config.output_dir).timings)
    assert {"profile", "match-schema"} <= set(timings)


def test_later_step_without_its_inputs_reports_missing_artifact(
    benchmark_config, tmp_path, capsys
) -> None:
    code = main(["--config", str(benchmark_config), "--step", "fuse", "--out", str(tmp_path / "x")])

    assert code == EXIT_MISSING_ARTIFACT
    assert "Missing artifact:" in capsys.readouterr().out


def test_invalid_configuration(tmp_path) -> None:
    missing = tmp_path / "nope.json"
    broken = tmp_path / "broken.json"
    broken.write_text(json.dumps({"sources": [], "target_schema": "t.json"}), encoding="utf-8")

    assert main(["--config", str(missing)]) == EXIT_INVALID
    assert main(["--config", str(broken)]) == EXIT_INVALID


def test_exhausted_budget_stops_the_run(tmp_path) -> None:
    config = small_benchmark(tmp_path / "bench", oracle={"budget_micro": 1})

    code = main(["--config", str(config), "--out", str(tmp_path / "run")])

    assert code == EXIT_BUDGET


@pytest.mark.slow
def test_closed_loop_on_full_benchmark(tmp_path) -> None:
    files = generate_benchmark(tmp_path / "bench", records_per_source=2000, seed=7)
    out = tmp_path / "run"

    assert main(["--config", str(files.config), "--out", str(out)]) == EXIT_OK

    schema = json.loads((out / "schema_evaluation.json").read_text(encoding="utf-8"))
    matching = json.loads((out / "matching_evaluation.json").read_text(encoding="utf-8"))
    fusion = json.loads((out / "fusion_evaluation.json").read_text(encoding="utf-8"))
    assert schema["macro_f1"] == 1.0
    assert matching["average_f1"] >= 0.95
    assert fusion["test_accuracy"] >= 0.90
