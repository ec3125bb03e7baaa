from __future__ import annotations

from datetime import date

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.blocking import RecordRef
from src.clustering import EntityCluster, build_clusters, filter_all
from src.datamodel import AttributeDescriptor, TargetSchema, ValueType
from src.errors import ConfigurationError, DatasetError
from src.fusion import (
    Candidate,
    FusionContext,
    FusionStrategy,
    FusionValidationSet,
    ResolverName,
    ResolverSpec,
    StrategyEvaluator,
    StrategyProvenance,
    ValidationEntry,
    ValidationOrigin,
    alternatives,
    applicable,
    build_strategy,
    evaluate_strategy,
    fuse,
    fusion_accuracy_by_entity,
    generate_validation_set,
    heuristic_strategy,
    load_validation_set,
    oracle_strategy,
    order_neighbours,
    propose_strategies,
    resolve_conflict,
    save_validation_set,
    values_equal,
)
from src.matching import RecordCorrespondence

from .conftest import make_dataset, make_oracle


def resolve(values, name, *, parameters=None, context=None, sources=("shop", "wiki", "catalog")):
    candidates = [
        Candidate(value, source, f"{source}-1", completeness)
        for (value, completeness), source in zip(values, sources)
    ]
    context = context or FusionContext({"attr": ["wiki", "shop", "catalog"]})
    return resolve_conflict(candidates, ResolverSpec(name, parameters or {}), context, "attr")


def test_voting_majority_and_priority_ties() -> None:
    majority = resolve([("A", 1), ("B", 1), ("A", 1)], ResolverName.VOTING)
    tie = resolve([("A", 1), ("B", 1)], ResolverName.VOTING)
    longest = resolve(
        [("Ab", 1), ("B", 1)], ResolverName.VOTING, parameters={"tie_break": "longest"}
    )

    assert (majority.value, majority.sources) == ("A", ("catalog", "shop"))
    assert tie.value == "B"
    assert longest.value == "Ab"


def test_numeric_and_string_resolvers() -> None:
    numbers = [(1.0, 1), (2.0, 1), (6.0, 1)]
    names = [("Blue", 1), ("Blue Lantern", 1)]

    assert resolve(numbers, ResolverName.AVERAGE).value == 3.0
    assert resolve(numbers, ResolverName.MEDIAN).value == 2.0
    assert resolve(names, ResolverName.LONGEST_STRING).value == "Blue Lantern"
    assert resolve(names, ResolverName.SHORTEST_STRING).value == "Blue"


def test_recency_priority_and_completeness_resolvers() -> None:
    values = [("old", 5), ("new", 2)]
    dated = FusionContext(
        {"attr": ["shop", "wiki"]},
        {"shop": date(2020, 1, 1), "wiki": date(2021, 1, 1)},
    )

    assert resolve(values, ResolverName.MOST_RECENT, context=dated).value == "new"
    assert (
        resolve(values, ResolverName.SOURCE_PRIORITY, parameters={"order": ["shop"]}).value
        == "old"
    )
    assert resolve(values, ResolverName.FAVOUR_NON_NULL).value == "old"


def test_union_list_follows_source_priority() -> None:
    fused = resolve([(["Action", "RPG"], 1), (["rpg", "Puzzle"], 1)], ResolverName.UNION_LIST)

    assert fused.value == ["rpg", "Puzzle", "Action"]


def test_nulls_and_single_values_pass_through() -> None:
    assert resolve([(None, 0), (None, 0)], ResolverName.AVERAGE).value is None
    single = resolve([("Same", 1), (None, 0), ("Same", 1)], ResolverName.LONGEST_STRING)
    assert (single.value, single.sources) == ("Same", ("catalog", "shop"))


def test_resolver_applicability() -> None:
    name = AttributeDescriptor("name")
    sales = AttributeDescriptor("sales", ValueType.NUMBER)
    undated = FusionContext()

    assert not applicable(ResolverName.AVERAGE, name, undated)
    assert applicable(ResolverName.MEDIAN, sales, undated)
    assert not applicable(ResolverName.MOST_RECENT, sales, undated)
    assert applicable(ResolverName.MOST_RECENT, sales, FusionContext({}, {"shop": date.today()}))


@pytest.mark.parametrize(
    ("fused", "truth", "declared", "expected"),
    [
        (100.0, "100.5", ValueType.NUMBER, True),
        (100.0, "102", ValueType.NUMBER, False),
        ("n/a", "N/A", ValueType.NUMBER, True),
        (date(2017, 3, 3), "March 3, 2017", ValueType.DATE, True),
        (["Action", "RPG"], "action; rpg", ValueType.LIST, True),
        (["a", "b", "c", "d"], ["a", "b", "c", "d", "e"], ValueType.LIST, True),
        (["a", "b", "c"], ["a", "b", "c", "d", "e"], ValueType.LIST, False),
        ("Silent Harbor!", "silent harbor", ValueType.STRING, True),
        (None, None, ValueType.STRING, True),
        (None, "x", ValueType.STRING, False),
        ("3:45", "4:30", ValueType.DURATION, False),
    ],
)
def test_values_equal(fused, truth, declared, expected) -> None:
    assert values_equal(fused, truth, declared) is expected


def small_target() -> TargetSchema:
    return TargetSchema(
        attributes=(
            AttributeDescriptor("id"),
            AttributeDescriptor("name"),
            AttributeDescriptor("sales", ValueType.NUMBER),
        ),
        id_attribute="id",
    )


SHOP = [
    ("Silent Harbor", None),
    ("Crimson Forge", None),
    ("Frozen Rift", None),
    ("Ember Vale", 100.0),
    ("Iron Tide", 200.0),
]
WIKI = [
    ("Silent Harbor Saga", None),
    ("Crimson Forge", None),
    ("Frozen Rift Origins", None),
    ("Ember Vale", 500.0),
    ("Iron Tide", None),
]
TRUTH = {
    "e1": {"name": "Silent Harbor Saga"},
    "e2": {"name": "Crimson Forge"},
    "e3": {"name": "Frozen Rift Origins"},
    "e4": {"sales": 500},
    "e5": {"sales": 200},
}


def fusion_fixture():
    def rows(prefix, values):
        return [
            {"id": f"{prefix}{index}", "name": name, "sales": sales}
            for index, (name, sales) in enumerate(values, start=1)
        ]

    types = {"sales": ValueType.NUMBER}
    datasets = [
        make_dataset("shop", rows("s", SHOP), types=types),
        make_dataset("wiki", rows("w", WIKI), types=types),
    ]
    clusters = [
        EntityCluster(f"cluster-{index}", [("shop", f"s{index}"), ("wiki", f"w{index}")])
        for index in range(1, 6)
    ]
    entities = {
        f"{dataset}:{dataset[0]}{index}": f"e{index}"
        for index in range(1, 6)
        for dataset in ("shop", "wiki")
    }
    target = small_target()
    context = FusionContext.from_datasets(datasets, target)
    return datasets, clusters, entities, target, context


def validation_for_truth() -> FusionValidationSet:
    entries = []
    for index in range(1, 6):
        for attribute, value in TRUTH[f"e{index}"].items():
            entries.append(
                ValidationEntry(f"cluster-{index}", attribute, str(value), ValidationOrigin.ORACLE)
            )
    return FusionValidationSet(entries)


def test_heuristic_strategy_scores_four_of_five() -> None:
    datasets, clusters, _, target, context = fusion_fixture()
    strategy = heuristic_strategy(target, context)

    accuracy = evaluate_strategy(
        strategy, clusters, datasets, target, validation_for_truth(), context
    )

    assert context.order("sales") == ["shop", "wiki"]
    assert strategy.resolvers["sales"].name is ResolverName.MEDIAN
    assert accuracy == pytest.approx(0.8)


def test_refinement_finds_a_better_source_order() -> None:
    datasets, clusters, _, target, context = fusion_fixture()
    evaluator = StrategyEvaluator(clusters, datasets, target, validation_for_truth(), context)

    search = propose_strategies(target, context, evaluator)

    assert [item.provenance for item in search.candidates] == [
        StrategyProvenance.HEURISTIC,
        StrategyProvenance.REFINED,
    ]
    assert search.selected.provenance is StrategyProvenance.REFINED
    assert search.selected.validation_accuracy == 1.0
    assert search.selected.resolvers["sales"].label() == "source_priority[wiki>shop]"


def test_oracle_strategy_with_inapplicable_proposal() -> None:
    datasets, clusters, _, target, context = fusion_fixture()
    oracle = make_oracle({"strategy": {"name": "union_list", "sales": "average"}})

    strategy = oracle_strategy(target, context, oracle)
    accuracy = evaluate_strategy(
        strategy, clusters, datasets, target, validation_for_truth(), context
    )

    assert strategy.provenance is StrategyProvenance.ORACLE
    assert strategy.resolvers["name"].parameters == {"tie_break": "longest"}
    assert strategy.resolvers["sales"].name is ResolverName.AVERAGE
    assert accuracy == pytest.approx(0.8)


def test_strategy_must_cover_every_fused_attribute(tmp_path) -> None:
    _, _, _, target, context = fusion_fixture()

    with pytest.raises(ConfigurationError):
        build_strategy(
            {"name": ResolverSpec(ResolverName.VOTING)}, target, context, StrategyProvenance.ORACLE
        )
    with pytest.raises(ConfigurationError):
        build_strategy(
            {
                "name": ResolverSpec(ResolverName.VOTING),
                "sales": ResolverSpec(ResolverName.MOST_RECENT),
            },
            target,
            context,
            StrategyProvenance.ORACLE,
        )
    strategy = heuristic_strategy(target, context)
    assert FusionStrategy.load(strategy.save(tmp_path / "strategy.json")) == strategy


def test_fuse_writes_one_record_per_cluster_with_provenance() -> None:
    datasets, clusters, entities, target, context = fusion_fixture()
    strategy = heuristic_strategy(target, context)

    result = fuse(clusters, strategy.resolvers, datasets, target, context)

    fused = result.dataset
    assert [record.id for record in fused] == [cluster.cluster_id for cluster in clusters]
    assert fused.record("cluster-4").get("sales") == 300.0
    assert fused.record("cluster-1").get("id") == "cluster-1"
    assert len(result.provenance) == 10
    assert result.stats.conflicts == 3
    assert result.stats.to_dict()["histogram"] == {"2": 5}
    conflict = next(row for row in result.provenance if row.fused_id == "cluster-1")
    assert conflict.sources == ("wiki",)
    assert conflict.resolver == "voting"
    assert fusion_accuracy_by_entity(fused, clusters, target, entities, TRUTH) == pytest.approx(0.8)


def test_oracle_validation_set_covers_conflicting_attributes() -> None:
    datasets, clusters, entities, target, _ = fusion_fixture()
    oracle = make_oracle({"entities": entities, "entity_values": TRUTH})

    validation = generate_validation_set(clusters, datasets, target, oracle)
    sampled = generate_validation_set(clusters, datasets, target, oracle, sample_size=2)

    assert [entry.key for entry in validation] == [
        ("cluster-1", "name"),
        ("cluster-3", "name"),
        ("cluster-4", "sales"),
    ]
    assert validation.entries[2].value == "500"
    assert all(entry.origin is ValidationOrigin.ORACLE for entry in validation)
    assert len(sampled) == 2
    with pytest.raises(ConfigurationError):
        generate_validation_set(clusters, datasets, target, oracle, rag=True)


def test_validation_file_and_checks(tmp_path) -> None:
    datasets, clusters, _, target, context = fusion_fixture()
    path = tmp_path / "validation.csv"
    path.write_text("cluster_id,attribute,value\ncluster-1,name,\n", encoding="utf-8")

    loaded = load_validation_set(path)

    assert loaded.entries == [
        ValidationEntry("cluster-1", "name", None, ValidationOrigin.HUMAN_FILE)
    ]
    copy = load_validation_set(save_validation_set(validation_for_truth(), tmp_path / "v.csv"))
    assert copy.entries == validation_for_truth().entries
    with pytest.raises(DatasetError):
        FusionValidationSet([loaded.entries[0], loaded.entries[0]])
    unknown = FusionValidationSet(
        [ValidationEntry("cluster-9", "name", "x", ValidationOrigin.ORACLE)]
    )
    with pytest.raises(DatasetError):
        StrategyEvaluator(clusters, datasets, target, unknown, context)
    with pytest.raises(ValueError):
        StrategyEvaluator(clusters, datasets, target, FusionValidationSet(), context)


conservation_edges = st.lists(
    st.tuples(
        st.sampled_from([("catalog", "shop"), ("catalog", "wiki"), ("shop", "wiki")]),
        st.integers(min_value=0, max_value=4),
        st.integers(min_value=0, max_value=4),
        st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
    ),
    max_size=25,
)


@settings(max_examples=50, deadline=None)
@given(edges=conservation_edges)
def test_fused_rows_equal_inputs_minus_merged_records(edges) -> None:
    types = {"sales": ValueType.NUMBER}
    datasets = [
        make_dataset(
            name,
            [
                {"id": f"{name[0]}{index}", "name": f"{name} {index}", "sales": float(index)}
                for index in range(5)
            ],
            types=types,
        )
        for name in ("catalog", "shop", "wiki")
    ]
    correspondences = [
        RecordCorrespondence(
            RecordRef(left, f"{left[0]}{a}"), RecordRef(right, f"{right[0]}{b}"), score
        )
        for (left, right), a, b, score in edges
    ]
    target = small_target()
    context = FusionContext.from_datasets(datasets, target)

    clusters = build_clusters(filter_all(correspondences), datasets)
    strategy = heuristic_strategy(target, context)
    result = fuse(clusters, strategy.resolvers, datasets, target, context)

    total = sum(len(dataset) for dataset in datasets)
    assert len(result.dataset) == total - sum(len(cluster) - 1 for cluster in clusters)


def test_small_source_sets_try_every_priority_order() -> None:
    orders = order_neighbours(["wiki", "shop", "catalog"])

    assert len(orders) == 6
    assert orders[0] == ["wiki", "shop", "catalog"]
    assert len({tuple(order) for order in orders}) == 6


def test_many_sources_try_neighbouring_priority_orders_only() -> None:
    sources = [f"source{index}" for index in range(8)]
    orders = order_neighbours(sources)

    assert len(orders) == 2 * len(sources) - 2
    assert orders[0] == sources
    assert len({tuple(order) for order in orders}) == len(orders)
    assert all(sorted(order) == sorted(sources) for order in orders)
    assert ["source5"] + sources[:5] + sources[6:] in orders


def test_priority_alternatives_start_from_the_current_order() -> None:
    sources = [f"source{index}" for index in range(8)]
    context = FusionContext({"name": sources})
    current = ResolverSpec(ResolverName.SOURCE_PRIORITY, {"order": sources[::-1]})

    options = [
        option
        for option in alternatives(AttributeDescriptor("name"), context, current)
        if option.name is ResolverName.SOURCE_PRIORITY
    ]

    assert len(options) == 14
    assert options[0] == current
