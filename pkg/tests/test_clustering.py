from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.blocking import RecordRef
from src.clustering import (
    EntityCluster,
    bipartite_filter,
    build_clusters,
    check_clusters,
    compare_filters,
    exact_bipartite_filter,
    filter_all,
    load_clusters,
    parse_token,
    save_clusters,
    size_histogram,
)
from src.errors import ClusterIntegrityError
from src.matching import RecordCorrespondence

from .conftest import make_dataset

SOURCES = ("catalog", "shop", "wiki")


def link(dataset_a: str, id_a: str, dataset_b: str, id_b: str, score: float):
    return RecordCorrespondence(RecordRef(dataset_a, id_a), RecordRef(dataset_b, id_b), score)


def datasets(size: int):
    return [
        make_dataset(name, [{"id": f"{name[0]}{index}", "name": "x"} for index in range(size)])
        for name in SOURCES
    ]


def test_greedy_filter_keeps_best_edge_per_record() -> None:
    edges = [
        link("shop", "s1", "wiki", "w1", 0.9),
        link("shop", "s1", "wiki", "w2", 0.8),
        link("shop", "s2", "wiki", "w1", 0.85),
        link("shop", "s2", "wiki", "w2", 0.3),
    ]

    kept = bipartite_filter(edges)

    assert [(item.record_a.id, item.record_b.id) for item in kept] == [("s1", "w1"), ("s2", "w2")]


def test_exact_filter_can_beat_greedy() -> None:
    edges = [
        link("shop", "s1", "wiki", "w1", 0.9),
        link("shop", "s1", "wiki", "w2", 0.85),
        link("shop", "s2", "wiki", "w1", 0.85),
    ]

    comparison = compare_filters(edges)

    assert [(item.record_a.id, item.record_b.id) for item in exact_bipartite_filter(edges)] == [
        ("s1", "w2"),
        ("s2", "w1"),
    ]
    assert comparison.greedy_count == 1
    assert comparison.exact_count == 2
    assert comparison.gap == pytest.approx(0.8)


def test_filter_all_works_per_dataset_pair() -> None:
    edges = [
        link("shop", "s1", "wiki", "w1", 0.9),
        link("shop", "s1", "wiki", "w2", 0.8),
        link("catalog", "c1", "shop", "s1", 0.7),
    ]

    kept = filter_all(edges)

    assert len(kept) == 2
    assert {item.record_b.dataset for item in kept} == {"shop", "wiki"}
    with pytest.raises(KeyError):
        filter_all(edges, "random")


def test_clusters_follow_transitivity_and_include_singletons() -> None:
    edges = [
        link("catalog", "c0", "shop", "s0", 0.9),
        link("shop", "s0", "wiki", "w0", 0.8),
        link("catalog", "c1", "wiki", "w1", 0.7),
    ]

    clusters = build_clusters(edges, datasets(2))

    members = [cluster.members for cluster in clusters]
    assert [("catalog", "c0"), ("shop", "s0"), ("wiki", "w0")] in members
    assert [("catalog", "c1"), ("wiki", "w1")] in members
    assert [("shop", "s1")] in members
    assert size_histogram(clusters) == {3: 1, 2: 1, 1: 1}
    assert [cluster.cluster_id for cluster in clusters] == ["cluster-1", "cluster-2", "cluster-3"]


def test_union_that_would_merge_same_source_records_is_rejected() -> None:
    edges = [
        link("catalog", "c0", "shop", "s0", 0.9),
        link("catalog", "c0", "wiki", "w0", 0.8),
        link("shop", "s1", "wiki", "w0", 0.95),
    ]

    clusters = build_clusters(edges, datasets(2))

    by_member = {member: cluster for cluster in clusters for member in cluster.members}
    assert len(by_member[("wiki", "w0")]) == 2
    assert by_member[("wiki", "w0")].member_of("shop") == "s1"
    assert by_member[("catalog", "c0")].members == [("catalog", "c0"), ("shop", "s0")]


def test_unknown_records_are_rejected() -> None:
    with pytest.raises(LookupError):
        build_clusters([link("shop", "nope", "wiki", "w0", 0.9)], datasets(1))


def test_integrity_check() -> None:
    bad = EntityCluster("cluster-1", [("shop", "s1"), ("shop", "s2")])

    with pytest.raises(ClusterIntegrityError):
        check_clusters([bad])


edge_lists = st.lists(
    st.tuples(
        st.sampled_from([("catalog", "shop"), ("catalog", "wiki"), ("shop", "wiki")]),
        st.integers(min_value=0, max_value=5),
        st.integers(min_value=0, max_value=5),
        st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
    ),
    max_size=40,
)


@settings(max_examples=200, deadline=None)
@given(edges=edge_lists, matching=st.sampled_from(["greedy", "exact"]))
def test_clusters_partition_records_with_one_record_per_source(edges, matching) -> None:
    sources = datasets(6)
    correspondences = [
        link(left, f"{left[0]}{a}", right, f"{right[0]}{b}", score)
        for (left, right), a, b, score in edges
    ]

    clusters = build_clusters(filter_all(correspondences, matching), sources)

    members = [member for cluster in clusters for member in cluster.members]
    assert len(members) == len(set(members)) == sum(len(dataset) for dataset in sources)
    assert max(len(cluster) for cluster in clusters) <= len(SOURCES)
    for cluster in clusters:
        assert len(set(cluster.datasets)) == len(cluster)


def test_cluster_file(tmp_path) -> None:
    clusters = [
        EntityCluster(
            "cluster-1",
            [("shop", "s:1"), ("wiki", "w1")],
            [(("shop", "s:1"), ("wiki", "w1"), 0.75)],
        )
    ]

    loaded = load_clusters(save_clusters(clusters, tmp_path / "clusters.jsonl"))

    assert loaded == clusters
    assert parse_token("shop:s:1") == ("shop", "s:1")
    with pytest.raises(ValueError):
        parse_token("shop")
    with pytest.raises(FileNotFoundError):
        load_clusters(tmp_path / "missing.jsonl")
