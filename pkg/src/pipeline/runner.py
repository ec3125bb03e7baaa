"""
Stepwise integration pipeline driven by one run configuration.
"""

from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.blocking import embed_records, generate_candidates, save_pool
from src.clustering import (
    build_clusters,
    compare_filters,
    filter_all,
    group_by_pair,
    load_clusters,
    save_clusters,
)
from src.config import RunConfig
from src.datamodel import (
    Dataset,
    TargetSchema,
    load_dataset,
    load_target_schema,
    profile_dataset,
    write_dataset,
)
from src.errors import BudgetExhausted, ConfigurationError, TrainingDataError
from src.fusion import (
    FUSED_DATASET,
    FusionContext,
    StrategyEvaluator,
    fuse,
    fusion_accuracy_by_entity,
    generate_validation_set,
    heuristic_strategy,
    load_validation_set,
    propose_strategies,
    save_provenance,
    save_validation_set,
)
from src.matching import (
    RecordCorrespondence,
    evaluate_matching,
    export_model,
    load_pair_labels,
    load_record_correspondences,
    match_pair,
    save_labeled_pairs,
    save_record_correspondences,
)
from src.metrics import compute_report, macro_average, render_report
from src.normalization import (
    NormalizationHints,
    NormalizationMethod,
    NormalizationReport,
    TaxonomyMapping,
    apply_normalization,
    assign_normalizers,
    map_taxonomy,
)
from src.oracle import Oracle, UsageLedger, build_oracle, unit_prices
from src.schema_matching import (
    SchemaCorrespondence,
    evaluate_correspondences,
    gold_pairs,
    load_correspondences,
    match_all_with_oracle,
    match_instances,
    match_labels,
    project_to_target,
    save_correspondences,
    select_inner_metric,
    shared_target_attributes,
)

from .artifacts import ArtifactLayout, pair_stem, require
from .timing import StepTimer

logger = logging.getLogger(__name__)

STEPS: Tuple[str, ...] = (
    "profile",
    "match-schema",
    "normalize",
    "match-entities",
    "cluster",
    "fuse",
    "report",
)


@dataclass
class StepResult:
    step: str
    artifacts: List[Path] = field(default_factory=list)
    summary: str = ""


class IntegrationPipeline:
    """
    Runs the integration steps against the artifact directory of one config.

    Each step reads the artifacts of its predecessors from disk, so stepwise
    invocations compose into the same outputs as one ``all`` run.
    """

    def __init__(
        self,
        config: RunConfig,
        *,
        oracle_factory: Optional[Callable[[RunConfig, Path], Oracle]] = None,
        timer: Optional[StepTimer] = None,
    ) -> None:
        self.config = config
        self.layout = ArtifactLayout(config.output_dir)
        self.timer = timer or StepTimer()
        self._oracle_factory = oracle_factory or (
            lambda cfg, ledger: build_oracle(cfg, ledger_path=ledger)
        )
        self._oracle: Optional[Oracle] = None
        self._ledger_saved = 0
        self._target: Optional[TargetSchema] = None

    # -- shared state -------------------------------------------------------

    @property
    def oracle(self) -> Oracle:
        if self._oracle is None:
            self._oracle = self._oracle_factory(self.config, self.layout.ledger)
            self._ledger_saved = len(self._oracle.ledger.entries)
        return self._oracle

    @property
    def target(self) -> TargetSchema:
        if self._target is None:
            self._target = load_target_schema(self.config.target_schema)
        return self._target

    @property
    def source_names(self) -> List[str]:
        return [source.dataset_name for source in self.config.sources]

    def _load_sources(self) -> List[Dataset]:
        return [
            load_dataset(
                source.path,
                source.id_attribute,
                name=source.dataset_name,
                delimiter=source.delimiter,
            )
            for source in self.config.sources
        ]

    def _load_projected(self) -> List[Dataset]:
        paths = [self.layout.projected(name) for name in self.source_names]
        require(*paths)
        return [
            load_dataset(path, self.target.id_attribute, name=name, schema=self.target)
            for name, path in zip(self.source_names, paths)
        ]

    def _flush_ledger(self) -> None:
        if self._oracle is None:
            return
        self._oracle.ledger.save(self.layout.ledger, since=self._ledger_saved)
        self._ledger_saved = len(self._oracle.ledger.entries)

    def _check_budget_after(self, reason: str) -> None:
        oracle = self.oracle
        if oracle.budget_micro is not None and oracle.ledger.total_micro >= oracle.budget_micro:
            raise BudgetExhausted(
                f"oracle budget exhausted before enough labels were collected: {reason}"
            )

    # -- steps --------------------------------------------------------------

    def profile(self) -> StepResult:
        with self.timer.phase("profile", "execution"):
            sources = self._load_sources()
            document = {
                dataset.name: [profile.to_dict() for profile in profile_dataset(dataset)]
                for dataset in sources
            }
        path = self.layout.profiles
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(document, indent=2, ensure_ascii=False) + "\n", "utf-8")
        rows = sum(len(dataset) for dataset in sources)
        return StepResult("profile", [path], f"{len(sources)} sources, {rows} records")

    def match_schema(self) -> StepResult:
        require(self.layout.profiles)
        settings = self.config.schema_matching
        sources = self._load_sources()
        gold = None
        if settings.gold is not None:
            gold = gold_pairs(load_correspondences(settings.gold))

        with self.timer.phase("match-schema", "configuration"):
            if settings.matcher == "oracle":
                correspondences = match_all_with_oracle(
                    sources,
                    self.target,
                    self.oracle,
                    sample_rows=settings.sample_rows,
                    summary_values=settings.summary_values,
                )
            elif settings.matcher == "label":
                metric = settings.inner_metric
                if gold is not None:
                    metric = select_inner_metric(
                        sources, self.target, gold, settings.label_threshold
                    )
                    logger.info("Selected inner metric %s against gold", metric)
                correspondences = [
                    item
                    for source in sources
                    for item in match_labels(
                        source, self.target, metric, settings.label_threshold
                    )
                ]
            else:
                if settings.target_reference is None:
                    raise ConfigurationError(
                        "the instance matcher needs schema_matching.target_reference"
                    )
                reference = load_dataset(
                    settings.target_reference, name="target-reference", schema=self.target
                )
                correspondences = [
                    item
                    for source in sources
                    for item in match_instances(source, reference, settings.instance_threshold)
                ]

        artifacts = [save_correspondences(correspondences, self.layout.schema_correspondences)]
        mapped = sum(1 for item in correspondences if item.target_attribute is not None)
        summary = f"{mapped} column correspondences"
        if gold is not None:
            evaluation = evaluate_correspondences(correspondences, gold)
            path = self.layout.schema_evaluation
            path.write_text(json.dumps(evaluation.to_dict(), indent=2) + "\n", "utf-8")
            artifacts.append(path)
            summary += f", macro F1 {evaluation.macro_f1:.3f}"
        return StepResult("match-schema", artifacts, summary)

    def _correspondences(self) -> List[SchemaCorrespondence]:
        require(self.layout.schema_correspondences)
        return load_correspondences(self.layout.schema_correspondences)

    def normalize(self) -> StepResult:
        correspondences = self._correspondences()
        settings = self.config.normalization
        hints = NormalizationHints(
            decimal_separator=settings.decimal_separator,
            list_delimiter=settings.list_delimiter,
            day_first=settings.day_first,
        )
        sources = self._load_sources()
        profiles = {dataset.name: profile_dataset(dataset) for dataset in sources}
        assignments = assign_normalizers(profiles, correspondences, self.target)
        by_name = {dataset.name: dataset for dataset in sources}

        mappings: List[TaxonomyMapping] = []
        artifacts: List[Path] = []
        with self.timer.phase("normalize", "configuration"):
            for assignment in assignments:
                if assignment.method is not NormalizationMethod.TAXONOMY:
                    continue
                assert assignment.target_attribute is not None
                path = self.layout.mapping(assignment.dataset, assignment.column)
                overrides = TaxonomyMapping.load(path) if path.is_file() else None
                mapping = map_taxonomy(
                    by_name[assignment.dataset],
                    assignment.column,
                    self.target.attribute(assignment.target_attribute),
                    self.oracle,
                    batch_size=settings.taxonomy_batch_size,
                    overrides=overrides,
                )
                mappings.append(mapping)
                artifacts.append(mapping.save(self.layout.mappings))

        report = NormalizationReport()
        with self.timer.phase("normalize", "execution"):
            for dataset in sources:
                normalized, partial = apply_normalization(dataset, assignments, mappings, hints)
                report = report.merge(partial)
                projected = project_to_target(normalized, correspondences, self.target)
                artifacts.append(write_dataset(projected, self.layout.projected(dataset.name)))
        artifacts.append(report.save(self.layout.normalization_report))
        self.layout.normalization_table.write_text(report.render(), encoding="utf-8")
        artifacts.append(self.layout.normalization_table)
        code = report.totals(NormalizationMethod.CODE)
        taxonomy = report.totals(NormalizationMethod.TAXONOMY)
        summary = (
            f"{code.values_normalized} code-normalized and "
            f"{taxonomy.values_normalized} taxonomy-mapped values"
        )
        return StepResult("normalize", artifacts, summary)

    def _dataset_pairs(self) -> List[Tuple[str, str]]:
        pairs = self.config.matching.pairs
        if pairs is None:
            return list(itertools.combinations(sorted(self.source_names), 2))
        known = set(self.source_names)
        chosen: List[Tuple[str, str]] = []
        for left, right in pairs:
            if left not in known or right not in known or left == right:
                raise ConfigurationError(f"matching pair {left}/{right} does not name two sources")
            chosen.append(tuple(sorted((left, right))))  # type: ignore[arg-type]
        return sorted(set(chosen))

    def match_entities(self) -> StepResult:
        correspondences = self._correspondences()
        datasets = {dataset.name: dataset for dataset in self._load_projected()}
        blocking = self.config.blocking
        settings = self.config.matching
        artifacts: List[Path] = []
        predicted: List[RecordCorrespondence] = []
        evaluations: Dict[str, dict] = {}

        vectors: Dict[str, Dict[str, np.ndarray]] = {}
        with self.timer.phase("match-entities", "execution"):
            for name in sorted({name for pair in self._dataset_pairs() for name in pair}):
                vectors[name] = embed_records(
                    datasets[name], self.oracle, blocking.template, blocking.embed_batch_size
                )

        for left, right in self._dataset_pairs():
            dataset_a, dataset_b = datasets[left], datasets[right]
            with self.timer.phase("match-entities", "execution"):
                pool = generate_candidates(
                    dataset_a, dataset_b, blocking.k, vectors[left], vectors[right]
                )
                artifacts.append(save_pool(pool, self.layout.pool(left, right)))
            attributes = shared_target_attributes(correspondences, left, right, self.target)
            with self.timer.phase("match-entities", "configuration"):
                try:
                    result = match_pair(
                        dataset_a,
                        dataset_b,
                        pool,
                        self.target,
                        attributes,
                        self.oracle,
                        settings,
                        seed=self.config.seed,
                    )
                except TrainingDataError as error:
                    self._check_budget_after(str(error))
                    raise
            if result.model is None and pool:
                self._check_budget_after(f"no matcher trained for {left} x {right}")
            artifacts.append(save_labeled_pairs(result.labeled, self.layout.training(left, right)))
            if result.model is not None:
                artifacts.append(
                    export_model(result.model, result.feature_names, self.layout.model(left, right))
                )
            predicted.extend(result.correspondences)

            if settings.gold_test is not None:
                gold_path = Path(settings.gold_test) / f"{pair_stem(left, right)}.csv"
                if gold_path.is_file():
                    gold = {key: label for key, (label, _) in load_pair_labels(gold_path).items()}
                    prf = evaluate_matching((item.key for item in result.correspondences), gold)
                    evaluations[pair_stem(left, right)] = prf.to_dict()
                    logger.info(
                        "%s x %s against gold: P %.3f R %.3f F1 %.3f",
                        left,
                        right,
                        prf.precision,
                        prf.recall,
                        prf.f1,
                    )

        artifacts.append(
            save_record_correspondences(predicted, self.layout.record_correspondences)
        )
        summary = f"{len(predicted)} record correspondences"
        if evaluations:
            average = macro_average([entry["f1"] for entry in evaluations.values()])
            document = {"pairs": evaluations, "average_f1": average}
            path = self.layout.matching_evaluation
            path.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n", "utf-8")
            artifacts.append(path)
            summary += f", average gold F1 {average:.3f}"
        return StepResult("match-entities", artifacts, summary)

    def cluster(self) -> StepResult:
        require(self.layout.record_correspondences)
        datasets = self._load_projected()
        with self.timer.phase("cluster", "execution"):
            correspondences = load_record_correspondences(self.layout.record_correspondences)
            if self.config.clustering.matching == "greedy":
                for items in group_by_pair(correspondences).values():
                    compare_filters(items)
            filtered = filter_all(correspondences, self.config.clustering.matching)
            clusters = build_clusters(filtered, datasets)
        path = save_clusters(clusters, self.layout.clusters)
        groups = sum(1 for cluster in clusters if len(cluster) > 1)
        return StepResult("cluster", [path], f"{len(clusters)} clusters, {groups} fused groups")

    def _snapshot_dates(self) -> Dict[str, date]:
        return {
            source.dataset_name: source.snapshot_date
            for source in self.config.sources
            if source.snapshot_date is not None
        }

    def fuse(self) -> StepResult:
        require(self.layout.clusters)
        datasets = self._load_projected()
        clusters = load_clusters(self.layout.clusters)
        settings = self.config.fusion
        context = FusionContext.from_datasets(datasets, self.target, self._snapshot_dates())
        artifacts: List[Path] = []

        with self.timer.phase("fuse", "configuration"):
            if settings.validation_path is not None:
                validation = load_validation_set(settings.validation_path)
            else:
                validation = generate_validation_set(
                    clusters,
                    datasets,
                    self.target,
                    self.oracle,
                    sample_size=settings.sample_size,
                    rag=settings.rag,
                    seed=self.config.seed,
                )
            artifacts.append(save_validation_set(validation, self.layout.validation_set))
            if len(validation) == 0:
                logger.warning("Empty validation set; fusing with the heuristic strategy")
                strategy = heuristic_strategy(self.target, context)
            else:
                evaluator = StrategyEvaluator(clusters, datasets, self.target, validation, context)
                oracle = self.oracle if settings.validation_path is None else None
                search = propose_strategies(
                    self.target, context, evaluator, oracle, settings.refinement_sweeps
                )
                assert search.selected is not None
                strategy = search.selected
            artifacts.append(strategy.save(self.layout.strategy))

        with self.timer.phase("fuse", "execution"):
            result = fuse(clusters, strategy.resolvers, datasets, self.target, context)
            artifacts.append(write_dataset(result.dataset, self.layout.fused))
            artifacts.append(save_provenance(result.provenance, self.layout.provenance))

        summary = f"{len(result.dataset)} fused records"
        if strategy.validation_accuracy is not None:
            summary += f", validation accuracy {strategy.validation_accuracy:.3f}"
        if settings.test_truth is not None:
            truth = json.loads(Path(settings.test_truth).read_text(encoding="utf-8"))
            accuracy = fusion_accuracy_by_entity(
                result.dataset,
                clusters,
                self.target,
                truth["entities"],
                truth["entity_values"],
            )
            document = {"test_accuracy": accuracy, "stats": result.stats.to_dict()}
            path = self.layout.fusion_evaluation
            path.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n", "utf-8")
            artifacts.append(path)
            summary += f", test accuracy {accuracy:.3f}"
        return StepResult("fuse", artifacts, summary)

    def report(self) -> StepResult:
        require(self.layout.fused, self.layout.clusters)
        with self.timer.phase("report", "execution"):
            inputs = self._load_projected()
            clusters = load_clusters(self.layout.clusters)
            fused = load_dataset(
                self.layout.fused, self.target.id_attribute, name=FUSED_DATASET, schema=self.target
            )
            self._flush_ledger()
            ledger = UsageLedger.load(self.layout.ledger, unit_prices(self.config))
            runtimes = None
            if self.config.metrics.include_runtimes:
                runtimes = {**StepTimer.load(self.layout.timings), **self.timer.as_dict()}
            report = compute_report(
                inputs,
                clusters,
                fused,
                self.target,
                weighting=self.config.metrics.density_weighting,
                runtimes=runtimes,
                ledger=ledger.summary(),
            )
        self.layout.report_json.write_bytes(render_report(report, "json"))
        self.layout.report_text.write_bytes(render_report(report, "text"))
        summary = f"{report.output_records} output records"
        return StepResult("report", [self.layout.report_json, self.layout.report_text], summary)

    # -- orchestration ------------------------------------------------------

    def run_step(self, step: str) -> StepResult:
        handlers: Dict[str, Callable[[], StepResult]] = {
            "profile": self.profile,
            "match-schema": self.match_schema,
            "normalize": self.normalize,
            "match-entities": self.match_entities,
            "cluster": self.cluster,
            "fuse": self.fuse,
            "report": self.report,
        }
        if step not in handlers:
            raise ValueError(f"unknown step {step!r}")
        self.layout.root.mkdir(parents=True, exist_ok=True)
        logger.info("Running %s", step)
        try:
            result = handlers[step]()
        finally:
            self._flush_ledger()
            self.timer.save(self.layout.timings)
        return result

    def run(self, step: str = "all") -> List[StepResult]:
        """Run one step, or every step in order for ``all`` on a fresh ledger."""

        if step != "all":
            return [self.run_step(step)]
        for stale in (self.layout.ledger, self.layout.timings):
            if stale.exists() and self._oracle is None:
                stale.unlink()
        return [self.run_step(name) for name in STEPS]


def run_pipeline(config: RunConfig, step: str = "all") -> List[StepResult]:
    return IntegrationPipeline(config).run(step)


def artifact_lines(results: Sequence[StepResult]) -> List[str]:
    lines: List[str] = []
    for result in results:
        lines.append(f"[{result.step}] {result.summary}")
        lines.extend(f"[{result.step}] {path}" for path in result.artifacts)
    return lines
