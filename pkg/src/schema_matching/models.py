"""
Schema-level correspondences and their evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional

from src.metrics.evaluation import PRF


class MatcherKind(str, Enum):
    LABEL = "label"
    INSTANCE = "instance"
    ORACLE = "oracle"
    MANUAL = "manual"


@dataclass(frozen=True, slots=True)
class SchemaCorrespondence:
    """Source column of one dataset linked to a target attribute (None = no match)."""

    dataset: str
    source_attribute: str
    target_attribute: Optional[str]
    score: float
    matcher: MatcherKind

    def __post_init__(self) -> None:
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"correspondence score out of range: {self.score}")
        if self.target_attribute is None and self.matcher is not MatcherKind.ORACLE:
            raise ValueError("only the oracle matcher may report no match")
        if self.matcher in (MatcherKind.ORACLE, MatcherKind.MANUAL) and self.score != 1.0:
            raise ValueError(f"{self.matcher.value} correspondences carry score 1.0")

    @property
    def pair(self) -> tuple[str, Optional[str]]:
        return (self.source_attribute, self.target_attribute)

    def to_dict(self) -> Dict[str, object]:
        return {
            "source_dataset": self.dataset,
            "source_attribute": self.source_attribute,
            "target_attribute": self.target_attribute,
            "score": self.score,
            "matcher": self.matcher.value,
        }

    @classmethod
    def from_dict(cls, document: Dict[str, object]) -> "SchemaCorrespondence":
        return cls(
            dataset=str(document["source_dataset"]),
            source_attribute=str(document["source_attribute"]),
            target_attribute=document.get("target_attribute"),  # type: ignore[arg-type]
            score=float(document.get("score", 1.0)),  # type: ignore[arg-type]
            matcher=MatcherKind(document.get("matcher", MatcherKind.MANUAL.value)),
        )


@dataclass(frozen=True)
class MatchEvaluation:
    per_dataset: Dict[str, PRF] = field(default_factory=dict)
    macro_f1: float = 0.0

    def to_dict(self) -> Dict[str, object]:
        return {
            "per_dataset": {name: prf.to_dict() for name, prf in sorted(self.per_dataset.items())},
            "macro_f1": self.macro_f1,
        }


def one_to_one(
    scored: List[tuple[float, str, str]], threshold: float
) -> List[tuple[float, str, str]]:
    """
    Greedy one-to-one selection over ``(score, source, target)`` triples.

    Candidates below ``threshold`` are dropped; the rest are taken by
    descending score, ties by source then target name.
    """

    used_sources: set[str] = set()
    used_targets: set[str] = set()
    chosen = []
    for score, source, target in sorted(scored, key=lambda item: (-item[0], item[1], item[2])):
        if score < threshold or source in used_sources or target in used_targets:
            continue
        used_sources.add(source)
        used_targets.add(target)
        chosen.append((score, source, target))
    return chosen
