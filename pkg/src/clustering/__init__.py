"""
Clustering: one-to-one filtering and connected components over record correspondences.
"""

from .clusters import (
    DisjointSet,
    EntityCluster,
    build_clusters,
    check_clusters,
    load_clusters,
    member_token,
    parse_token,
    save_clusters,
    size_histogram,
)
from .filtering import (
    FILTERS,
    FilterComparison,
    bipartite_filter,
    compare_filters,
    exact_bipartite_filter,
    filter_all,
    group_by_pair,
)

__all__ = [
    "DisjointSet",
    "EntityCluster",
    "FILTERS",
    "FilterComparison",
    "bipartite_filter",
    "build_clusters",
    "check_clusters",
    "compare_filters",
    "exact_bipartite_filter",
    "filter_all",
    "group_by_pair",
    "load_clusters",
    "member_token",
    "parse_token",
    "save_clusters",
    "size_histogram",
]
