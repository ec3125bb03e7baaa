from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.datamodel import AttributeDescriptor, TargetSchema, ValueType
from src.metrics import (
    NOT_AVAILABLE,
    IntegrationReport,
    average_density,
    compute_report,
    load_report,
    macro_average,
    prf_from_counts,
    prf_from_sets,
    render_report,
    report_rows,
    round_half_up,
)
from src.oracle import TaskTag, UnitPrice, UsageLedger

from .conftest import make_dataset


def games() -> IntegrationReport:
    return IntegrationReport.from_counts(
        {"metacritic": 46_580, "sales": 20_494, "dbpedia": 7_877},
        65_518,
        7_235,
        avg_input_density=0.587,
        output_density=0.632,
    )


def companies() -> IntegrationReport:
    return IntegrationReport.from_counts(
        {"forbes": 2_000, "dbpedia": 10_085, "fullcontact": 1_931},
        12_768,
        1_031,
        avg_input_density=0.5284,
        output_density=0.5847,
    )


def music() -> IntegrationReport:
    return IntegrationReport.from_counts(
        {"musicbrainz": 22_627, "discogs": 9_865, "lastfm": 4_763},
        30_885,
        4_178,
        avg_input_density=0.726,
        output_density=0.708,
    )


@pytest.mark.parametrize(
    ("build", "expected"),
    [
        (
            games,
            {
                "Total Input Records": "74,951",
                "Output Records": "65,518",
                "Fusion Ratio": "11.0%",
                "Row Gain vs. Largest": "+18,938",
                "Row Gain %": "+40.7%",
                "Avg. Input Density": "58.7%",
                "Output Density": "63.2%",
                "Density Change": "+4.5pp",
            },
        ),
        (
            companies,
            {
                "Total Input Records": "14,016",
                "Fused Record Groups": "1,031",
                "Fusion Ratio": "8.1%",
                "Row Gain vs. Largest": "+2,683",
                "Row Gain %": "+26.6%",
                "Avg. Input Density": "52.8%",
                "Output Density": "58.5%",
                "Density Change": "+5.6pp",
            },
        ),
        (
            music,
            {
                "Total Input Records": "37,255",
                "Fusion Ratio": "13.5%",
                "Row Gain vs. Largest": "+8,258",
                "Row Gain %": "+36.5%",
                "Density Change": "-1.8pp",
            },
        ),
    ],
)
def test_published_case_study_rows(build, expected) -> None:
    rows = dict(report_rows(build()))

    assert rows["Data Sources"] == "3"
    for label, value in expected.items():
        assert rows[label] == value


def test_text_rendering_keeps_row_order_and_separators() -> None:
    text = render_report(companies()).decode("utf-8")
    lines = text.splitlines()

    assert lines[0].startswith("Metric")
    assert lines[1].startswith("Data Sources")
    assert lines[6] == "-" * 36
    assert lines[-1].startswith("Density Change")
    for value in ("12,768", "8.1%", "+26.6%", "+5.6pp"):
        assert value in text


def test_undefined_ratios_render_as_not_available() -> None:
    report = IntegrationReport.from_counts({"empty": 0}, 0, 0)
    rows = dict(report_rows(report))

    assert report.fusion_ratio is None
    assert report.row_gain_pct is None
    assert rows["Fusion Ratio"] == NOT_AVAILABLE
    assert rows["Row Gain vs. Largest"] == NOT_AVAILABLE
    assert rows["Row Gain %"] == NOT_AVAILABLE
    assert rows["Density Change"] == NOT_AVAILABLE


def test_output_equal_to_single_input_has_no_gain() -> None:
    report = IntegrationReport.from_counts({"only": 5}, 5, 0)
    rows = dict(report_rows(report))

    assert report.row_gain_abs == 0
    assert report.row_gain_pct == 0.0
    assert report.fusion_ratio == 0.0
    assert rows["Row Gain vs. Largest"] == "+0"
    assert rows["Fusion Ratio"] == "0.0%"


def test_fused_groups_cannot_exceed_output() -> None:
    with pytest.raises(ValueError):
        IntegrationReport.from_counts({"a": 3}, 2, 3)


def test_json_rendering_is_lossless() -> None:
    report = games()
    report.runtimes = {"matching": {"configuration": 12.5, "execution": 3.25}}

    payload = render_report(report, "json")

    assert json.loads(payload)["density_change_pp"] == pytest.approx(4.5)
    assert load_report(payload) == report
    with pytest.raises(ValueError):
        render_report(report, "html")


def test_round_half_up_survives_binary_artifacts() -> None:
    assert round_half_up(0.8935, 3) == 0.894
    assert round_half_up(0.25, 1) == 0.3
    assert round_half_up(-1.75, 1) == -1.8
    assert round_half_up(40.65, 1) == 40.7


@pytest.mark.parametrize(
    ("scores", "expected"),
    [
        ([0.930, 0.927, 0.857, 0.870, 0.800, 0.977], 0.894),
        ([0.826, 0.839, 0.954, 0.898, 0.991, 0.988], 0.916),
        ([0.849, 0.979, 0.939, 0.897, 0.990, 0.968], 0.937),
    ],
)
def test_macro_average_of_pair_scores(scores, expected) -> None:
    assert round_half_up(macro_average(scores), 3) == expected


def test_macro_average_of_nothing() -> None:
    assert macro_average([]) == 0.0


def test_macro_f1_over_datasets() -> None:
    assert round_half_up(macro_average([0.23, 0.35, 0.38]), 2) == 0.32


def test_prf_from_counts_and_sets() -> None:
    counts = prf_from_counts(8, 2, 8)
    sets = prf_from_sets({("a", "b"), ("c", "d")}, {("a", "b"), ("e", "f")})

    assert (counts.precision, counts.recall) == (0.8, 0.5)
    assert counts.f1 == pytest.approx(2 * 0.8 * 0.5 / 1.3)
    assert (sets.precision, sets.recall, sets.f1) == (0.5, 0.5, 0.5)
    assert (sets.true_positives, sets.false_positives, sets.false_negatives) == (1, 1, 1)
    assert prf_from_counts(0, 0, 0).f1 == 1.0
    assert prf_from_counts(0, 3, 0).f1 == 0.0


@settings(max_examples=200, deadline=None)
@given(
    predicted=st.sets(st.integers(min_value=0, max_value=30)),
    gold=st.sets(st.integers(min_value=0, max_value=30)),
)
def test_prf_bounds(predicted, gold) -> None:
    scores = prf_from_sets(predicted, gold)

    for value in (scores.precision, scores.recall, scores.f1):
        assert 0.0 <= value <= 1.0
    assert scores.f1 <= max(scores.precision, scores.recall) + 1e-12


def small_target() -> TargetSchema:
    return TargetSchema(
        attributes=(
            AttributeDescriptor("id"),
            AttributeDescriptor("name"),
            AttributeDescriptor("sales", ValueType.NUMBER),
        ),
        id_attribute="id",
    )


def report_inputs():
    types = {"sales": ValueType.NUMBER}
    shop = make_dataset(
        "shop",
        [{"id": "s1", "name": "A", "sales": None}, {"id": "s2", "name": "B", "sales": 1.0}],
        types=types,
    )
    wiki = make_dataset(
        "wiki",
        [{"id": f"w{index}", "name": f"W{index}", "sales": None} for index in range(1, 5)],
        types=types,
    )
    fused = make_dataset(
        "fused",
        [
            {"id": "cluster-1", "name": "A", "sales": 1.0},
            {"id": "cluster-2", "name": "B", "sales": None},
            {"id": "cluster-3", "name": "W3", "sales": None},
            {"id": "cluster-4", "name": "W4", "sales": None},
        ],
        types=types,
    )
    clusters = [["s1", "w1"], ["s2", "w2"], ["w3"], ["w4"]]
    return [shop, wiki], clusters, fused


def test_compute_report_over_datasets() -> None:
    inputs, clusters, fused = report_inputs()

    report = compute_report(inputs, clusters, fused, small_target())

    assert report.input_records == {"shop": 2, "wiki": 4}
    assert report.fused_groups == 2
    assert report.fusion_ratio == 0.5
    assert report.row_gain_abs == 0
    assert report.avg_input_density == pytest.approx(0.625)
    assert report.output_density == pytest.approx(0.625)
    assert dict(report_rows(report))["Density Change"] == "+0.0pp"


def test_row_weighted_input_density() -> None:
    inputs, clusters, fused = report_inputs()
    basis = ["name", "sales"]

    report = compute_report(inputs, clusters, fused, small_target(), weighting="row_weighted")

    assert report.avg_input_density == pytest.approx(3.5 / 6)
    assert average_density(inputs, basis, "unweighted") == pytest.approx(0.625)
    assert average_density([], basis, "unweighted") is None


def test_report_text_includes_runtimes_and_costs() -> None:
    inputs, clusters, fused = report_inputs()
    ledger = UsageLedger({TaskTag.PAIR_LABEL: UnitPrice(per_call=1_330_000)})
    ledger.record(TaskTag.PAIR_LABEL, 100, 1)

    report = compute_report(
        inputs,
        clusters,
        fused,
        small_target(),
        runtimes={"matching": {"configuration": 1.0, "execution": 2.0}},
        ledger=ledger.summary(),
    )
    text = render_report(report).decode("utf-8")

    assert "matching" in text
    assert "Training Set Generation" in text
    assert "$1.33" in text
    assert load_report(render_report(report, "json")).ledger == report.ledger
