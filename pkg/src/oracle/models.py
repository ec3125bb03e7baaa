"""
Oracle request types and the structured reply contracts per task.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Literal, Mapping, Optional, Type

from pydantic import BaseModel, ConfigDict


class TaskTag(str, Enum):
    """Ledger attribution of an oracle call."""

    SCHEMA_MATCH = "schema_match"
    TAXONOMY_MAP = "taxonomy_map"
    PAIR_LABEL = "pair_label"
    FUSION_SELECT_ENTITIES = "fusion_select_entities"
    FUSION_GROUNDTRUTH = "fusion_groundtruth"
    FUSION_GROUNDTRUTH_RAG = "fusion_groundtruth_rag"
    FUSION_STRATEGY = "fusion_strategy"
    EMBED = "embed"


def canonical_json(document: Any) -> str:
    return json.dumps(document, sort_keys=True, ensure_ascii=False, default=str)


@dataclass(frozen=True)
class OracleRequest:
    """
    One structured completion request.

    ``payload`` carries the same information as the rendered prompt in
    machine-readable form; it takes part in the request hash.
    """

    task_tag: TaskTag
    system_text: str
    user_text: str
    response_contract: str
    payload: Mapping[str, Any] = field(default_factory=dict)

    @property
    def digest(self) -> str:
        material = canonical_json(
            {
                "task_tag": self.task_tag.value,
                "system_text": self.system_text,
                "user_text": self.user_text,
                "response_contract": self.response_contract,
                "payload": self.payload,
            }
        )
        return hashlib.sha256(material.encode("utf-8")).hexdigest()


class _Reply(BaseModel):
    model_config = ConfigDict(extra="ignore")


class ColumnAssignment(_Reply):
    source_column: str
    target_attribute: Optional[str] = None


class SchemaMatchReply(_Reply):
    """``target_attribute`` null or "NONE" means no match."""

    correspondences: List[ColumnAssignment]


class ValueAssignment(_Reply):
    value: str
    target: Optional[str] = None


class TaxonomyReply(_Reply):
    """``target`` null means the raw value is retained."""

    mappings: List[ValueAssignment]


class PairLabelReply(_Reply):
    label: Literal["match", "non-match"]


class SelectEntitiesReply(_Reply):
    selected: List[str]


class AttributeValue(_Reply):
    attribute: str
    value: Any = None


class GroundTruthReply(_Reply):
    values: List[AttributeValue]


class ResolverChoice(_Reply):
    attribute: str
    resolver: str


class StrategyReply(_Reply):
    resolvers: List[ResolverChoice]


CONTRACTS: Dict[TaskTag, Type[BaseModel]] = {
    TaskTag.SCHEMA_MATCH: SchemaMatchReply,
    TaskTag.TAXONOMY_MAP: TaxonomyReply,
    TaskTag.PAIR_LABEL: PairLabelReply,
    TaskTag.FUSION_SELECT_ENTITIES: SelectEntitiesReply,
    TaskTag.FUSION_GROUNDTRUTH: GroundTruthReply,
    TaskTag.FUSION_GROUNDTRUTH_RAG: GroundTruthReply,
    TaskTag.FUSION_STRATEGY: StrategyReply,
}


def contract_for(task_tag: TaskTag) -> str:
    """JSON schema text of the reply model for a task."""

    return canonical_json(CONTRACTS[task_tag].model_json_schema())
