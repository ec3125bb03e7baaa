from __future__ import annotations

from datetime import date

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.datamodel import ColumnProfile, SemanticType, ValueType
from src.normalization import (
    RETAIN,
    UNPARSED,
    NormalizationHints,
    NormalizationMethod,
    NormalizationReport,
    NormalizerAssignment,
    NormalizerKind,
    TaxonomyMapping,
    apply_normalization,
    assign_normalizers,
    choose_normalizer,
    map_taxonomy,
    normalize_value,
    parse_date,
    parse_duration,
    parse_number,
    split_list,
)
from src.schema_matching import MatcherKind, SchemaCorrespondence

from .conftest import make_dataset, make_oracle


@pytest.mark.parametrize(
    ("text", "expected"),
    [
        ("3.2 million", 3_200_000.0),
        ("12 MEUR", 12_000_000.0),
        ("$1.5M", 1_500_000.0),
        ("1.234,56", 1234.56),
        ("1,234", 1234.0),
        ("1,5", 1.5),
        ("-42", -42.0),
        (7, 7.0),
    ],
)
def test_parse_number(text, expected) -> None:
    assert parse_number(text) == pytest.approx(expected)


def test_parse_number_failures_and_hints() -> None:
    assert parse_number("lots") is UNPARSED
    assert parse_number("3 zillion") is UNPARSED
    assert parse_number("1.234", NormalizationHints(decimal_separator=",")) == 1234.0


@pytest.mark.parametrize(
    ("text", "expected"),
    [
        ("2017-03-03", date(2017, 3, 3)),
        ("March 3, 2017", date(2017, 3, 3)),
        ("03/05/2017", date(2017, 3, 5)),
        ("2017-03", date(2017, 3, 1)),
        ("2017", date(2017, 1, 1)),
    ],
)
def test_parse_date(text, expected) -> None:
    assert parse_date(text) == expected


def test_parse_date_day_first_hint_and_failure() -> None:
    assert parse_date("03/05/2017", NormalizationHints(day_first=True)) == date(2017, 5, 3)
    assert parse_date("soon") is UNPARSED


@pytest.mark.parametrize(
    ("text", "minutes"),
    [("3:45", 3.75), ("1:02:30", 62.5), ("PT1H30M", 90.0), ("2h 15m", 135.0), ("90 sec", 1.5)],
)
def test_parse_duration(text, minutes) -> None:
    assert parse_duration(text) == pytest.approx(minutes)


def test_parse_duration_failure() -> None:
    assert parse_duration("a while") is UNPARSED


def test_split_list_delimiters() -> None:
    assert split_list("Action; RPG") == ["Action", "RPG"]
    assert split_list("Action, RPG") == ["Action", "RPG"]
    assert split_list("Action|RPG") == ["Action", "RPG"]
    assert split_list('["Action", "RPG"]') == ["Action", "RPG"]
    assert split_list(["Action", " RPG ", ""]) == ["Action", "RPG"]


def test_country_and_phone_normalizers() -> None:
    assert normalize_value("Deutschland", NormalizerKind.COUNTRY) == "DE"
    assert normalize_value("+49 (30) 1234-567", NormalizerKind.PHONE) == "+49301234567"
    assert normalize_value("12", NormalizerKind.PHONE) is UNPARSED
    assert normalize_value("kept", NormalizerKind.NONE) == "kept"


@settings(max_examples=200, deadline=None)
@given(
    amount=st.integers(min_value=0, max_value=10**9),
    scale=st.sampled_from(["", " thousand", " million", "k", "M", " bn"]),
)
def test_number_normalization_is_idempotent(amount, scale) -> None:
    once = parse_number(f"{amount}{scale}")

    assert once is not UNPARSED
    assert parse_number(once) == once


@settings(max_examples=200, deadline=None)
@given(
    day=st.dates(min_value=date(1900, 1, 1), max_value=date(2100, 12, 31)),
    layout=st.sampled_from(["%Y-%m-%d", "%B %d, %Y", "%m/%d/%Y"]),
)
def test_date_normalization_recovers_the_date_and_is_idempotent(day, layout) -> None:
    once = parse_date(day.strftime(layout))

    assert once == day
    assert parse_date(once) == once


@settings(max_examples=100, deadline=None)
@given(items=st.lists(st.text(alphabet="abcdefgh ", min_size=1, max_size=8), max_size=5))
def test_list_split_is_idempotent(items) -> None:
    once = split_list("; ".join(items))

    assert split_list(once) == once


def profile(column: str, detected: SemanticType = SemanticType.STRING) -> ColumnProfile:
    return ColumnProfile(column, detected, 1, 0.0)


def test_choose_normalizer() -> None:
    released = choose_normalizer(profile("released"), ValueType.DATE, "release_date")
    assert released is NormalizerKind.DATE
    assert choose_normalizer(profile("tel"), ValueType.STRING, "phone") is NormalizerKind.PHONE
    assert (
        choose_normalizer(profile("hq", SemanticType.COUNTRY), ValueType.STRING, "country")
        is NormalizerKind.COUNTRY
    )
    assert choose_normalizer(profile("title"), ValueType.STRING, "name") is NormalizerKind.NONE


def test_assign_normalizers_routes_value_sets_to_taxonomy(games_schema) -> None:
    correspondences = [
        SchemaCorrespondence("shop", "console", "platform", 1.0, MatcherKind.MANUAL),
        SchemaCorrespondence("shop", "released", "release_date", 1.0, MatcherKind.MANUAL),
    ]
    profiles = {
        "shop": [profile("sku"), profile("console"), profile("released", SemanticType.DATE)]
    }

    assignments = {
        item.column: item for item in assign_normalizers(profiles, correspondences, games_schema)
    }

    assert assignments["sku"].normalizer is NormalizerKind.NONE
    assert not assignments["sku"].touches
    assert assignments["console"].method is NormalizationMethod.TAXONOMY
    assert assignments["console"].target_attribute == "platform"
    assert assignments["released"].normalizer is NormalizerKind.DATE


def test_map_taxonomy_with_oracle_overrides_and_retention(games_schema) -> None:
    dataset = make_dataset(
        "shop",
        [
            {"id": "1", "console": "PC"},
            {"id": "2", "console": "PS4"},
            {"id": "3", "console": "Amiga"},
            {"id": "4", "console": "XB1"},
            {"id": "5", "console": None},
        ],
    )
    table = {"PS4": "PlayStation 4", "Amiga": "Commodore", "XB1": "Xbox One"}
    oracle = make_oracle({"taxonomy": {"platform": table}})
    overrides = TaxonomyMapping("shop", "console", "platform", {"XB1": "PC"})

    mapping = map_taxonomy(
        dataset, "console", games_schema.attribute("platform"), oracle, overrides=overrides
    )

    assert mapping.entries == {"Amiga": RETAIN, "PC": "PC", "PS4": "PlayStation 4", "XB1": "PC"}
    assert mapping.apply("unseen") is RETAIN


def test_map_taxonomy_requires_value_set(games_schema) -> None:
    dataset = make_dataset("shop", [{"id": "1", "title": "A"}])

    with pytest.raises(ValueError):
        map_taxonomy(dataset, "title", games_schema.attribute("name"), make_oracle())


def test_apply_normalization_counts_cells(tmp_path) -> None:
    dataset = make_dataset(
        "shop",
        [
            {"id": "s1", "title": "A", "console": "PC", "units": "1.5 million"},
            {"id": "s2", "title": "B", "console": "PS4", "units": "200 thousand"},
            {"id": "s3", "title": "C", "console": "Amiga", "units": "lots"},
            {"id": "s4", "title": "D", "console": None, "units": None},
        ],
    )
    assignments = [
        NormalizerAssignment("shop", "units", NormalizerKind.NUMERIC_SCALE, ValueType.NUMBER),
        NormalizerAssignment(
            "shop",
            "console",
            NormalizerKind.NONE,
            ValueType.CATEGORICAL,
            NormalizationMethod.TAXONOMY,
            "platform",
        ),
        NormalizerAssignment("shop", "title", NormalizerKind.NONE, None),
    ]
    mapping = TaxonomyMapping(
        "shop", "console", "platform", {"PC": "PC", "PS4": "PlayStation 4", "Amiga": RETAIN}
    )

    normalized, report = apply_normalization(dataset, assignments, [mapping])

    assert normalized.record("s1").get("units") == 1_500_000.0
    assert normalized.record("s2").get("console") == "PlayStation 4"
    assert normalized.record("s3").get("units") == "lots"
    assert normalized.record("s3").get("console") == "Amiga"
    code = report.row("shop", NormalizationMethod.CODE)
    taxonomy = report.row("shop", NormalizationMethod.TAXONOMY)
    assert (code.columns_touched, code.values_normalized, code.values_total) == (1, 2, 3)
    assert (taxonomy.columns_touched, taxonomy.values_normalized) == (1, 2)
    assert taxonomy.values_total == 3

    loaded = NormalizationReport.load(report.save(tmp_path / "report.json"))
    assert loaded.to_dict() == report.to_dict()
    table = report.render().splitlines()
    assert len(table) == 3
    assert table[-1].startswith("Total")


def test_report_totals_are_additive_across_datasets() -> None:
    first, second = NormalizationReport(), NormalizationReport()
    first.row("shop", NormalizationMethod.CODE).values_total = 4
    second.row("wiki", NormalizationMethod.CODE).values_total = 6

    assert first.merge(second).totals(NormalizationMethod.CODE).values_total == 10
