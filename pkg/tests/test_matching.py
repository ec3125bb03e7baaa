from __future__ import annotations

import json
from datetime import date

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from src.blocking import CandidatePair, RecordRef, embed_records, generate_candidates
from src.config import MatchingConfig, load_run_config
from src.datamodel import Record
from src.errors import DatasetError, TrainingDataError
from src.matching import (
    MISSING,
    FeatureSpace,
    Label,
    LabeledPair,
    LabelSource,
    LearnerSpec,
    MatcherModel,
    PairLabeler,
    TrainedScorer,
    TrainingVariant,
    augmentation_size,
    check_committee,
    committee_scores,
    evaluate_matching,
    export_model,
    has_both_classes,
    load_pair_labels,
    match_pair,
    monge_elkan,
    predict,
    run_active_learning,
    sample_validation_pairs,
    save_labeled_pairs,
    seed_labeling,
    select_disagreement_batch,
    select_model,
    train_committee,
    train_scorer,
    widen_seeds,
)
from src.matching.similarity import jaccard_tokens, jaro_winkler, levenshtein_similarity
from src.pipeline import ArtifactLayout, IntegrationPipeline
from src.synthetic import generate_benchmark

from .conftest import make_dataset, make_oracle

SHORT_TEXT = st.text(alphabet="abcd ", max_size=8)


def brute_levenshtein(a: str, b: str) -> float:
    if not a and not b:
        return 1.0
    previous = list(range(len(b) + 1))
    for i, left in enumerate(a, start=1):
        current = [i]
        for j, right in enumerate(b, start=1):
            current.append(
                min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (left != right))
            )
        previous = current
    return 1.0 - previous[-1] / max(len(a), len(b))


def brute_jaro(first: str, second: str) -> float:
    """Matches are claimed scanning ``second``, earliest free position in ``first``."""

    if not first and not second:
        return 1.0
    if not first or not second:
        return 0.0
    window = max(0, max(len(first), len(second)) // 2 - 1)
    taken_first = [False] * len(first)
    taken_second = [False] * len(second)
    for j, char in enumerate(second):
        for i in range(max(0, j - window), min(len(first), j + window + 1)):
            if not taken_first[i] and first[i] == char:
                taken_first[i] = taken_second[j] = True
                break
    matches = sum(taken_first)
    if matches == 0:
        return 0.0
    left = [char for char, taken in zip(first, taken_first) if taken]
    right = [char for char, taken in zip(second, taken_second) if taken]
    transpositions = sum(1 for a, b in zip(left, right) if a != b) // 2
    return (
        matches / len(first) + matches / len(second) + (matches - transpositions) / matches
    ) / 3


def brute_jaro_winkler(first: str, second: str) -> float:
    jaro = brute_jaro(first, second)
    if jaro <= 0.7:
        return jaro
    prefix = 0
    for a, b in zip(first[:4], second[:4]):
        if a != b:
            break
        prefix += 1
    return jaro + prefix * 0.1 * (1.0 - jaro)


@settings(max_examples=1000, deadline=None)
@given(a=SHORT_TEXT, b=SHORT_TEXT)
def test_levenshtein_matches_dynamic_programming(a, b) -> None:
    assert levenshtein_similarity(a, b) == pytest.approx(brute_levenshtein(a, b))


@settings(max_examples=1000, deadline=None)
@given(a=SHORT_TEXT, b=SHORT_TEXT)
def test_jaccard_matches_token_sets(a, b) -> None:
    left, right = set(a.split()), set(b.split())
    expected = 1.0 if not left and not right else len(left & right) / len(left | right)

    assert jaccard_tokens(a, b) == pytest.approx(expected)


@settings(max_examples=1000, deadline=None)
@given(a=SHORT_TEXT, b=SHORT_TEXT)
def test_jaro_winkler_matches_reference_definition(a, b) -> None:
    expected = brute_jaro_winkler(a, b)
    # skip the rare inputs where the scan direction changes the transposition count
    assume(expected == pytest.approx(brute_jaro_winkler(b, a)))

    assert jaro_winkler(a, b) == pytest.approx(expected)


@settings(max_examples=1000, deadline=None)
@given(
    outer=st.lists(st.text(alphabet="abcd", min_size=1, max_size=6), max_size=4),
    inner=st.lists(st.text(alphabet="abcd", min_size=1, max_size=6), max_size=4),
)
def test_monge_elkan_is_mean_of_best_inner_scores(outer, inner) -> None:
    if not outer and not inner:
        expected = 1.0
    elif not outer or not inner:
        expected = 0.0
    else:
        expected = sum(
            max(levenshtein_similarity(token, other) for other in inner) for token in outer
        ) / len(outer)

    assert monge_elkan(outer, inner, levenshtein_similarity) == pytest.approx(expected)


def test_feature_vector_by_datatype(games_schema) -> None:
    space = FeatureSpace.for_attributes(
        games_schema, ["name", "release_date", "genres", "sales"]
    )
    left = Record(
        "s1",
        {
            "name": "Silent Harbor",
            "release_date": date(2017, 3, 3),
            "genres": ["Action", "RPG"],
            "sales": 100.0,
        },
        "shop",
    )
    right = Record(
        "w1",
        {
            "name": "SILENT HARBOR",
            "release_date": date(2018, 3, 3),
            "genres": ["action"],
            "sales": None,
        },
        "wiki",
    )

    vector = dict(zip(space.names, space.vector(left, right, 0.8)))

    assert space.names[-1] == "embedding:cosine"
    assert len(space) == 9
    assert vector["name:jaro-winkler"] == 1.0
    assert vector["name:cosine-tfidf-char3"] == pytest.approx(1.0)
    assert vector["release_date:year-diff"] == pytest.approx(0.9)
    assert vector["release_date:day-diff"] == 0.0
    assert vector["genres:jaccard"] == pytest.approx(0.5)
    assert vector["sales:scaled-abs-diff"] == MISSING
    assert vector["embedding:cosine"] == pytest.approx(0.8)


def pair(id_a: str, id_b: str, similarity: float = 0.5) -> CandidatePair:
    return CandidatePair(RecordRef("shop", id_a), RecordRef("wiki", id_b), similarity, 1)


def paired_datasets(count: int):
    shop = make_dataset("shop", [{"id": f"s{i}", "name": f"Game {i}"} for i in range(count)])
    wiki = make_dataset("wiki", [{"id": f"w{i}", "name": f"Title {i}"} for i in range(count)])
    entities = {f"shop:s{i}": f"e{i}" for i in range(count)}
    entities.update({f"wiki:w{i}": f"e{i}" for i in range(count)})
    return shop, wiki, make_oracle({"entities": entities})


def test_labeler_respects_label_budget_and_reuses_labels() -> None:
    shop, wiki, oracle = paired_datasets(3)
    labeler = PairLabeler(oracle, shop, wiki, budget=2)

    first = labeler.label([pair("s0", "w0"), pair("s0", "w1"), pair("s1", "w1")], LabelSource.GOLD)
    again = labeler.label([pair("s0", "w0")], LabelSource.GOLD)

    assert [item.label for item in first.pairs] == [Label.MATCH, Label.NON_MATCH]
    assert first.exhausted
    assert again.pairs[0].label is Label.MATCH
    assert labeler.used == 2
    assert len(oracle.ledger.entries) == 2


def test_seed_labeling_stops_each_query_after_one_match_and_two_non_matches() -> None:
    shop, wiki, oracle = paired_datasets(6)
    pool = [pair("s0", f"w{i}", 0.9 - 0.1 * i) for i in range(6)]
    labeler = PairLabeler(oracle, shop, wiki)

    seeds = seed_labeling(pool, labeler, target_seed_count=100, per_query_bottom=2)

    assert [item.key for item in seeds.pairs] == [
        ("s0", "w0"),
        ("s0", "w1"),
        ("s0", "w2"),
        ("s0", "w4"),
        ("s0", "w5"),
    ]
    assert all(item.label_source is LabelSource.ORACLE_SEED for item in seeds.pairs)
    assert sum(item.is_match for item in seeds.pairs) == 1


def small_committee() -> list[LearnerSpec]:
    return [
        LearnerSpec("regularized-linear", {}, 0),
        LearnerSpec("bagged-trees", {"n_estimators": 20}, 1),
        LearnerSpec("boosted-trees", {"n_estimators": 20}, 2),
    ]


def test_committee_composition_rules() -> None:
    with pytest.raises(ValueError):
        check_committee(small_committee()[:2])
    with pytest.raises(ValueError):
        check_committee([LearnerSpec("bagged-trees", {}, seed) for seed in range(3)])
    with pytest.raises(ValueError):
        LearnerSpec("neural-net")


def separable(count: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    labels = np.array([1 if index % 4 == 0 else 0 for index in range(count)])
    centre = np.where(labels[:, None] == 1, 0.85, 0.3)
    features = np.clip(centre + rng.normal(0, 0.08, size=(count, 3)), 0, 1)
    return features, labels


def test_committee_scores_every_pair() -> None:
    features, labels = separable(80)

    committee = train_committee(small_committee(), features, labels, search_budget=2)
    scores = committee_scores(committee, features)

    assert scores.shape == (3, 80)
    assert ((scores >= 0) & (scores <= 1)).all()
    assert scores[:, labels == 1].mean() > scores[:, labels == 0].mean()


def test_single_class_training_data_is_rejected() -> None:
    with pytest.raises(TrainingDataError):
        train_scorer(LearnerSpec("regularized-linear"), np.zeros((4, 2)), [0, 0, 0, 0])


def test_disagreement_batch_takes_highest_variance_with_id_ties() -> None:
    candidates = [pair("s2", "w0"), pair("s1", "w0"), pair("s0", "w0")]
    scores = np.array([[0.5, 0.1, 0.9], [0.5, 0.9, 0.1]])

    batch = select_disagreement_batch(candidates, scores, 2)

    assert [item.key for item in batch] == [("s0", "w0"), ("s1", "w0")]
    with pytest.raises(ValueError):
        select_disagreement_batch(candidates, scores[:1], 2)


def test_augmentation_size_rounds_up() -> None:
    assert augmentation_size(600, 0.2) == 120
    assert augmentation_size(7, 0.2) == 2
    assert augmentation_size(10, 0.0) == 0


def active_learning_setup(count: int, budget, seed: int = 3):
    shop, wiki, oracle = paired_datasets(count)
    pool = [pair(f"s{i}", f"w{j}") for i in range(count) for j in range(count)]
    rng = np.random.default_rng(seed)
    matches = np.array([candidate.key[0][1:] == candidate.key[1][1:] for candidate in pool])
    centre = np.where(matches[:, None], 0.85, 0.3)
    features = np.clip(centre + rng.normal(0, 0.1, size=(len(pool), 3)), 0, 1)
    labeler = PairLabeler(oracle, shop, wiki, budget)
    diagonal = [candidate for candidate, match in zip(pool, matches) if match]
    others = [candidate for candidate, match in zip(pool, matches) if not match][:60]
    seeds = labeler.label(diagonal + others, LabelSource.ORACLE_SEED).pairs
    return pool, features, seeds, labeler


@pytest.mark.parametrize("seed", range(20))
def test_active_learning_reaches_target_in_five_rounds(seed) -> None:
    pool, features, seeds, labeler = active_learning_setup(40, budget=3000, seed=seed)

    result = run_active_learning(
        pool, features, seeds, labeler, small_committee(), search_budget=1, seed=seed
    )

    assert len(seeds) == 100
    assert result.rounds == 5
    assert len(result.core) == 600
    assert len(result.augmented) - len(result.core) == 120
    assert labeler.used == 720 <= labeler.budget
    assert len({item.key for item in result.augmented}) == 720
    assert not result.exhausted


def test_active_learning_stops_at_the_label_budget() -> None:
    pool, features, seeds, labeler = active_learning_setup(40, budget=300)

    result = run_active_learning(
        pool, features, seeds, labeler, small_committee(), search_budget=1
    )

    assert result.exhausted
    assert len(result.core) == 300
    assert result.augmented == result.core
    assert labeler.used == 300


class FixedEstimator:
    """Scores row ``i`` with ``scores[i]``; features carry the row index."""

    classes_ = [0, 1]

    def __init__(self, scores) -> None:
        self.scores = np.asarray(scores, dtype=np.float64)

    def predict_proba(self, features: np.ndarray) -> np.ndarray:
        picked = self.scores[features[:, 0].astype(int)]
        return np.column_stack([1 - picked, picked])


def fixed_scorer(family: str, scores) -> TrainedScorer:
    return TrainedScorer(LearnerSpec(family), FixedEstimator(scores), {})


def test_selection_prefers_higher_threshold_on_f1_ties() -> None:
    rows = np.arange(4, dtype=np.float64)[:, None]
    labels = [1, 1, 0, 0]
    linear = fixed_scorer("regularized-linear", [0.9, 0.8, 0.3, 0.1])
    boosted = fixed_scorer("boosted-trees", [0.95, 0.9, 0.2, 0.1])

    model = select_model(
        {TrainingVariant.CORE: [linear, boosted]}, rows, labels, [0.2, 0.5, 0.85]
    )

    assert model.scorer is boosted
    assert model.threshold == 0.85
    assert model.member_index == 1
    assert model.validation_f1 == 1.0
    with pytest.raises(TrainingDataError):
        select_model({TrainingVariant.CORE: [linear]}, rows, [0, 0, 0, 0], [0.5])


def test_predict_keeps_pairs_at_or_above_threshold() -> None:
    scorer = fixed_scorer("regularized-linear", [0.5, 0.49])
    model = MatcherModel(scorer, 0.5, TrainingVariant.CORE, 1.0)
    pairs = [pair("s0", "w0"), pair("s1", "w1")]

    correspondences = predict(model, pairs, np.arange(2, dtype=np.float64)[:, None])

    assert [item.key for item in correspondences] == [("s0", "w0")]
    assert correspondences[0].score == 0.5


def test_validation_sample_covers_top_decile_and_skips_training_pairs() -> None:
    pool = [pair(f"s{index}", "w0", 1.0 - index / 100) for index in range(100)]
    exclude = {("s50", "w0"), ("s51", "w0")}

    sample = sample_validation_pairs(pool, exclude, size=20, seed=4)

    keys = {item.key for item in sample}
    assert len(sample) == 20
    assert {(f"s{index}", "w0") for index in range(10)} <= keys
    assert not keys & exclude
    assert sample == sample_validation_pairs(pool, exclude, size=20, seed=4)


def test_export_model_writes_parameters(tmp_path) -> None:
    features, labels = separable(40)
    scorer = train_scorer(LearnerSpec("regularized-linear", {"C": 1.0}), features, labels)
    model = MatcherModel(scorer, 0.5, TrainingVariant.AUGMENTED, 0.9)

    path = export_model(model, ["a", "b", "c"], tmp_path / "model.json")

    document = json.loads(path.read_text(encoding="utf-8"))
    assert document["family"] == "regularized-linear"
    assert document["training_variant"] == "core+random-augmented"
    assert len(document["parameters"]["coefficients"]) == 3


def test_evaluate_matching_ignores_pairs_outside_the_gold_set() -> None:
    gold = {("a", "b"): Label.MATCH, ("c", "d"): Label.NON_MATCH, ("e", "f"): Label.MATCH}

    result = evaluate_matching([("a", "b"), ("c", "d"), ("x", "y")], gold)

    assert (result.precision, result.recall, result.f1) == (0.5, 0.5, 0.5)


def test_pair_label_file(tmp_path) -> None:
    labeled = [LabeledPair(pair("s0", "w0"), Label.MATCH, LabelSource.ORACLE_ACTIVE)]
    path = save_labeled_pairs(labeled, tmp_path / "labels.csv")

    assert load_pair_labels(path) == {("s0", "w0"): (Label.MATCH, LabelSource.ORACLE_ACTIVE)}

    gold = tmp_path / "gold.csv"
    gold.write_text("id_a,id_b,label\ns0,w0,match\ns0,w0,non-match\n", encoding="utf-8")
    with pytest.raises(DatasetError):
        load_pair_labels(gold)


def test_widening_labels_deeper_candidates_until_a_match_appears() -> None:
    shop, wiki, oracle = paired_datasets(6)
    pool = [pair("s0", f"w{i}", 0.9 - 0.1 * i) for i in range(1, 6)] + [pair("s0", "w0", 0.2)]
    labeler = PairLabeler(oracle, shop, wiki)
    seeds = labeler.label(pool[:2], LabelSource.ORACLE_SEED)
    assert not has_both_classes(seeds.pairs)

    widened = widen_seeds(pool, labeler, seeds, extra=10)

    assert [item.key for item in widened.pairs] == [
        ("s0", "w1"),
        ("s0", "w2"),
        ("s0", "w3"),
        ("s0", "w4"),
        ("s0", "w5"),
        ("s0", "w0"),
    ]
    assert has_both_classes(widened.pairs)
    assert labeler.used == 6


def titled_sources(shop_titles, wiki_titles, shared: int):
    shop = make_dataset("shop", [{"id": f"s{i}", "name": n} for i, n in enumerate(shop_titles)])
    wiki = make_dataset("wiki", [{"id": f"w{i}", "name": n} for i, n in enumerate(wiki_titles)])
    entities = {f"shop:s{i}": f"shop-{i}" for i in range(len(shop_titles))}
    entities.update({f"wiki:w{i}": f"wiki-{i}" for i in range(len(wiki_titles))})
    entities.update({f"wiki:w{i}": f"shop-{i}" for i in range(shared)})
    return shop, wiki, make_oracle({"entities": entities})


def candidate_pool(shop, wiki, oracle, k: int = 5):
    vectors_shop = embed_records(shop, oracle, ["name"])
    vectors_wiki = embed_records(wiki, oracle, ["name"])
    return generate_candidates(shop, wiki, k, vectors_shop, vectors_wiki)


def test_sources_without_shared_entities_get_no_model(games_schema) -> None:
    shop, wiki, oracle = titled_sources(
        [f"Alpha Quest {i} Saga" for i in range(30)],
        [f"Zeta Racer {i} Deluxe" for i in range(30)],
        shared=0,
    )
    pool = candidate_pool(shop, wiki, oracle)
    config = MatchingConfig(
        seed_target=20, batch_size=20, target_size=60, validation_size=40, search_budget=1
    )

    result = match_pair(shop, wiki, pool, games_schema, ["name"], oracle, config)

    assert result.model is None
    assert result.correspondences == []
    assert result.validation == []
    assert all(item.label is Label.NON_MATCH for item in result.training)
    assert result.labels_used == len(result.training)
    assert 40 <= result.labels_used <= 42


def test_random_sampling_spends_the_active_label_count(games_schema) -> None:
    titles = [f"Alpha Quest {i} Saga" for i in range(30)]
    shop, wiki, oracle = titled_sources(titles, titles, shared=30)
    pool = candidate_pool(shop, wiki, oracle)
    config = MatchingConfig(sampling="random", target_size=40, validation_size=40, search_budget=1)

    result = match_pair(shop, wiki, pool, games_schema, ["name"], oracle, config, seed=2)

    assert len(result.training) == 48
    assert result.rounds == 0
    assert all(item.label_source is LabelSource.ORACLE_RANDOM for item in result.training)
    assert result.model is not None
    assert result.model.variant is TrainingVariant.CORE
    assert result.labels_used == len(result.training) + len(result.validation)


@pytest.mark.slow
def test_active_learning_matches_or_beats_random_sampling_of_equal_budget(tmp_path) -> None:
    files = generate_benchmark(tmp_path / "bench", records_per_source=300, seed=11)
    config = load_run_config(files.config)
    config.output_dir = tmp_path / "run"
    config.oracle.embedding_dimension = 128
    config.matching.seed_target = 20
    config.matching.batch_size = 20
    config.matching.target_size = 100
    config.matching.validation_size = 100
    config.matching.search_budget = 2
    for step in ("profile", "match-schema", "normalize"):
        IntegrationPipeline(config).run(step)

    def average_f1(seed: int, sampling: str) -> float:
        config.seed = seed
        config.matching.sampling = sampling
        IntegrationPipeline(config).run("match-entities")
        path = ArtifactLayout(config.output_dir).matching_evaluation
        return json.loads(path.read_text(encoding="utf-8"))["average_f1"]

    wins = sum(average_f1(seed, "active") >= average_f1(seed, "random") for seed in range(5))

    assert wins >= 4
