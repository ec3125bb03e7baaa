"""
Fusion strategies: candidate generation, validation scoring and selection.
"""

from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from src.clustering import EntityCluster
from src.datamodel import AttributeDescriptor, Dataset, TargetSchema, ValueType
from src.errors import ConfigurationError
from src.oracle import Oracle, StrategyReply, TaskTag, build_request

from .engine import cluster_records, fuse_attribute
from .equality import values_equal
from .resolvers import (
    RESOLVER_DESCRIPTIONS,
    FusionContext,
    ResolverName,
    ResolverSpec,
    applicable,
    check_applicable,
)
from .validation import FusionValidationSet

logger = logging.getLogger(__name__)


class StrategyProvenance(str, Enum):
    HEURISTIC = "heuristic"
    ORACLE = "oracle"
    REFINED = "refined"


_PRECEDENCE = {
    StrategyProvenance.HEURISTIC: 0,
    StrategyProvenance.ORACLE: 1,
    StrategyProvenance.REFINED: 2,
}


@dataclass
class FusionStrategy:
    resolvers: Dict[str, ResolverSpec]
    provenance: StrategyProvenance
    validation_accuracy: Optional[float] = None
    correct: int = 0
    total: int = 0

    def to_dict(self) -> Dict[str, object]:
        return {
            "provenance": self.provenance.value,
            "validation_accuracy": self.validation_accuracy,
            "correct": self.correct,
            "total": self.total,
            "attributes": {name: spec.to_dict() for name, spec in self.resolvers.items()},
        }

    @classmethod
    def from_dict(cls, document: Mapping[str, object]) -> "FusionStrategy":
        attributes = document["attributes"]
        assert isinstance(attributes, Mapping)
        return cls(
            resolvers={name: ResolverSpec.from_dict(spec) for name, spec in attributes.items()},
            provenance=StrategyProvenance(document.get("provenance", "heuristic")),
            validation_accuracy=document.get("validation_accuracy"),  # type: ignore[arg-type]
            correct=int(document.get("correct") or 0),  # type: ignore[arg-type]
            total=int(document.get("total") or 0),  # type: ignore[arg-type]
        )

    def save(self, path: Path | str) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        document = json.dumps(self.to_dict(), indent=2, sort_keys=True)
        path.write_text(document + "\n", encoding="utf-8")
        return path

    @classmethod
    def load(cls, path: Path | str) -> "FusionStrategy":
        path = Path(path)
        if not path.is_file():
            raise FileNotFoundError(f"strategy not found: {path}")
        return cls.from_dict(json.loads(path.read_text(encoding="utf-8")))


def build_strategy(
    resolvers: Mapping[str, ResolverSpec],
    target: TargetSchema,
    context: FusionContext,
    provenance: StrategyProvenance,
) -> FusionStrategy:
    """Check that every fused attribute has one applicable resolver."""

    names = {attribute.name for attribute in target.fused_attributes}
    missing = sorted(names - set(resolvers))
    extra = sorted(set(resolvers) - names)
    if missing or extra:
        raise ConfigurationError(
            f"strategy must cover the fused attributes exactly (missing {missing}, unknown {extra})"
        )
    for attribute in target.fused_attributes:
        check_applicable(resolvers[attribute.name], attribute, context)
    ordered = {attribute.name: resolvers[attribute.name] for attribute in target.fused_attributes}
    return FusionStrategy(ordered, provenance)


def heuristic_resolver(attribute: AttributeDescriptor, context: FusionContext) -> ResolverSpec:
    declared = attribute.declared_type
    if declared.is_numeric:
        return ResolverSpec(ResolverName.MEDIAN)
    if declared is ValueType.LIST:
        return ResolverSpec(ResolverName.UNION_LIST)
    if declared is ValueType.DATE and context.snapshot_dates:
        return ResolverSpec(ResolverName.MOST_RECENT)
    if declared is ValueType.DATE:
        return ResolverSpec(ResolverName.VOTING)
    return ResolverSpec(ResolverName.VOTING, {"tie_break": "longest"})


def heuristic_strategy(target: TargetSchema, context: FusionContext) -> FusionStrategy:
    resolvers = {
        attribute.name: heuristic_resolver(attribute, context)
        for attribute in target.fused_attributes
    }
    return build_strategy(resolvers, target, context, StrategyProvenance.HEURISTIC)


def applicable_resolvers(attribute: AttributeDescriptor, context: FusionContext) -> List[str]:
    return [name.value for name in ResolverName if applicable(name, attribute, context)]


def oracle_strategy(
    target: TargetSchema, context: FusionContext, oracle: Oracle
) -> FusionStrategy:
    """Resolver per attribute as proposed by the oracle; gaps fall back to the heuristic."""

    payload = {
        "attributes": [
            {
                "name": attribute.name,
                "type": attribute.declared_type.value,
                "description": attribute.description,
                "applicable": applicable_resolvers(attribute, context),
            }
            for attribute in target.fused_attributes
        ],
        "resolver_descriptions": RESOLVER_DESCRIPTIONS,
    }
    reply = oracle.invoke(build_request(TaskTag.FUSION_STRATEGY, payload))
    assert isinstance(reply, StrategyReply)
    proposed = {choice.attribute: choice.resolver for choice in reply.resolvers}
    resolvers: Dict[str, ResolverSpec] = {}
    for attribute in target.fused_attributes:
        choice = proposed.get(attribute.name)
        if choice in applicable_resolvers(attribute, context):
            resolvers[attribute.name] = ResolverSpec(ResolverName(choice))
            continue
        if choice is not None:
            logger.warning(
                "Oracle proposed %s for %s, which does not apply; using the heuristic",
                choice,
                attribute.name,
            )
        resolvers[attribute.name] = heuristic_resolver(attribute, context)
    return build_strategy(resolvers, target, context, StrategyProvenance.ORACLE)


class StrategyEvaluator:
    """Scores resolver choices against a validation set, one attribute at a time."""

    def __init__(
        self,
        clusters: Sequence[EntityCluster],
        datasets: Sequence[Dataset],
        target: TargetSchema,
        validation: FusionValidationSet,
        context: FusionContext,
    ) -> None:
        if len(validation) == 0:
            raise ValueError("strategy evaluation needs a non-empty validation set")
        by_cluster = {cluster.cluster_id: cluster for cluster in clusters}
        validation.check_clusters(clusters)
        by_name = {dataset.name: dataset for dataset in datasets}
        self.target = target
        self.context = context
        self.total = len(validation)
        self._entries: Dict[str, List[Tuple[list, Optional[str]]]] = {}
        for entry in validation:
            members = cluster_records(by_cluster[entry.cluster_id], by_name)
            self._entries.setdefault(entry.attribute, []).append((members, entry.value))

    def attribute_correct(self, attribute: str, spec: ResolverSpec) -> int:
        declared = self.target.attribute(attribute).declared_type
        correct = 0
        for members, truth in self._entries.get(attribute, []):
            resolution, _ = fuse_attribute(members, attribute, spec, self.context)
            correct += values_equal(resolution.value, truth, declared)
        return correct

    def score(self, strategy: FusionStrategy) -> FusionStrategy:
        correct = sum(
            self.attribute_correct(attribute, spec)
            for attribute, spec in strategy.resolvers.items()
        )
        return replace(
            strategy, validation_accuracy=correct / self.total, correct=correct, total=self.total
        )


def evaluate_strategy(
    strategy: FusionStrategy,
    clusters: Sequence[EntityCluster],
    datasets: Sequence[Dataset],
    target: TargetSchema,
    validation: FusionValidationSet,
    context: FusionContext,
) -> float:
    """Fraction of validation entries whose fused value equals the ground truth."""

    evaluator = StrategyEvaluator(clusters, datasets, target, validation, context)
    scored = evaluator.score(strategy)
    assert scored.validation_accuracy is not None
    return scored.validation_accuracy


EXHAUSTIVE_ORDER_SOURCES = 4


def order_neighbours(order: Sequence[str]) -> List[List[str]]:
    """
    Source orders to try from ``order``.

    Every permutation up to ``EXHAUSTIVE_ORDER_SOURCES`` sources; above that the
    order itself, its adjacent swaps and each source moved to the front.
    """

    if len(order) <= EXHAUSTIVE_ORDER_SOURCES:
        return [list(permutation) for permutation in itertools.permutations(order)]
    base = list(order)
    neighbours = [base]
    for index in range(len(base) - 1):
        swapped = list(base)
        swapped[index], swapped[index + 1] = swapped[index + 1], swapped[index]
        neighbours.append(swapped)
    for index in range(2, len(base)):
        neighbours.append([base[index]] + base[:index] + base[index + 1 :])
    return neighbours


def alternatives(
    attribute: AttributeDescriptor,
    context: FusionContext,
    current: Optional[ResolverSpec] = None,
) -> List[ResolverSpec]:
    """Every applicable resolver; source_priority once per neighbouring source order."""

    options: List[ResolverSpec] = []
    for name in ResolverName:
        if not applicable(name, attribute, context):
            continue
        if name is ResolverName.SOURCE_PRIORITY:
            if current is not None and current.name is name and "order" in current.parameters:
                sources = list(current.parameters["order"])
            else:
                sources = context.order(attribute.name) or context.sources
            for order in order_neighbours(sources):
                options.append(ResolverSpec(name, {"order": order}))
        elif name is ResolverName.VOTING:
            options.append(ResolverSpec(name))
            if attribute.declared_type in (ValueType.STRING, ValueType.CATEGORICAL):
                options.append(ResolverSpec(name, {"tie_break": "longest"}))
        else:
            options.append(ResolverSpec(name))
    return options


def refine_strategy(
    base: FusionStrategy, evaluator: StrategyEvaluator, sweeps: int = 3
) -> FusionStrategy:
    """
    Hill-climb over single-attribute resolver swaps.

    Each sweep tries every applicable alternative for every attribute and keeps a
    swap only when it raises validation accuracy; stops at a fixpoint or after
    ``sweeps`` sweeps.
    """

    resolvers = dict(base.resolvers)
    current = {name: evaluator.attribute_correct(name, spec) for name, spec in resolvers.items()}
    for sweep in range(sweeps):
        improved = False
        for attribute in evaluator.target.fused_attributes:
            for option in alternatives(attribute, evaluator.context, resolvers[attribute.name]):
                if option == resolvers[attribute.name]:
                    continue
                correct = evaluator.attribute_correct(attribute.name, option)
                if correct > current[attribute.name]:
                    logger.debug(
                        "Sweep %d: %s %s -> %s (+%d)",
                        sweep + 1,
                        attribute.name,
                        resolvers[attribute.name].label(),
                        option.label(),
                        correct - current[attribute.name],
                    )
                    resolvers[attribute.name] = option
                    current[attribute.name] = correct
                    improved = True
        if not improved:
            break
    refined = build_strategy(
        resolvers, evaluator.target, evaluator.context, StrategyProvenance.REFINED
    )
    return evaluator.score(refined)


def select_strategy(candidates: Sequence[FusionStrategy]) -> FusionStrategy:
    """Highest validation accuracy; ties prefer heuristic, then oracle, then refined."""

    if not candidates:
        raise ValueError("no strategy candidates to select from")
    indexed = list(enumerate(candidates))
    _, best = min(
        indexed,
        key=lambda item: (
            -round(item[1].validation_accuracy or 0.0, 12),
            _PRECEDENCE[item[1].provenance],
            item[0],
        ),
    )
    logger.info(
        "Selected %s strategy: validation accuracy %.3f (%d/%d)",
        best.provenance.value,
        best.validation_accuracy or 0.0,
        best.correct,
        best.total,
    )
    return best


@dataclass
class StrategySearch:
    candidates: List[FusionStrategy] = field(default_factory=list)
    selected: Optional[FusionStrategy] = None


def propose_strategies(
    target: TargetSchema,
    context: FusionContext,
    evaluator: StrategyEvaluator,
    oracle: Optional[Oracle] = None,
    sweeps: int = 3,
) -> StrategySearch:
    """Heuristic, oracle-proposed and refined candidates, all scored; the best is selected."""

    search = StrategySearch()
    search.candidates.append(evaluator.score(heuristic_strategy(target, context)))
    if oracle is not None:
        search.candidates.append(evaluator.score(oracle_strategy(target, context, oracle)))
    best = select_strategy(search.candidates)
    search.candidates.append(refine_strategy(best, evaluator, sweeps))
    search.selected = select_strategy(search.candidates)
    return search
