"""
Deterministic mock transport answering from truth tables.

The rulebook per task:

* schema_match: synonym lookup by ``dataset.column``, then ``column``, then an
  exact target-attribute name; anything else is NONE.
* taxonomy_map: a value already in the value set maps to itself; otherwise the
  taxonomy table for the attribute decides; unknown values are retained.
* pair_label: when both records are listed in the entity table the label is
  entity equality; otherwise "match" iff the normalized name attributes have a
  Jaro-Winkler similarity of at least 0.95.
* fusion tasks: answered from the well-known list, the entity value table and
  the strategy table.
"""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

from pydantic import BaseModel, Field
from rapidfuzz.distance import JaroWinkler

from .models import TaskTag, canonical_json
from .transports import OracleTransport, TransportReply, estimate_units

MATCH_SIMILARITY = 0.95

_NON_WORD = re.compile(r"[^\w\s]")


class MockTables(BaseModel):
    synonyms: Dict[str, str] = Field(default_factory=dict)
    taxonomy: Dict[str, Dict[str, str]] = Field(default_factory=dict)
    entities: Dict[str, str] = Field(default_factory=dict)
    entity_values: Dict[str, Dict[str, Any]] = Field(default_factory=dict)
    well_known: Optional[List[str]] = None
    strategy: Dict[str, str] = Field(default_factory=dict)

    @classmethod
    def load(cls, path: Path | str) -> "MockTables":
        return cls.model_validate(json.loads(Path(path).read_text(encoding="utf-8")))


def normalize_name(value: Any) -> str:
    if value is None:
        return ""
    return " ".join(_NON_WORD.sub(" ", str(value).casefold()).split())


def record_key(dataset: str, record_id: str) -> str:
    return f"{dataset}:{record_id}"


class MockTransport(OracleTransport):
    """Rule-based transport; replies depend only on the request payload."""

    name = "mock"

    def __init__(
        self,
        tables: Optional[MockTables] = None,
        *,
        name_attribute: str = "name",
        grounded: bool = False,
    ) -> None:
        self.tables = tables or MockTables()
        self.name_attribute = name_attribute
        self.grounded = grounded

    def complete(self, request) -> TransportReply:
        handlers = {
            TaskTag.SCHEMA_MATCH: self._schema_match,
            TaskTag.TAXONOMY_MAP: self._taxonomy_map,
            TaskTag.PAIR_LABEL: self._pair_label,
            TaskTag.FUSION_SELECT_ENTITIES: self._select_entities,
            TaskTag.FUSION_GROUNDTRUTH: self._ground_truth,
            TaskTag.FUSION_GROUNDTRUTH_RAG: self._ground_truth,
            TaskTag.FUSION_STRATEGY: self._strategy,
        }
        reply = handlers[request.task_tag](request.payload)
        text = canonical_json(reply)
        return TransportReply(
            text=text,
            input_units=estimate_units(request.system_text + request.user_text),
            output_units=estimate_units(text),
        )

    def _schema_match(self, payload: Mapping[str, Any]) -> Dict[str, Any]:
        dataset = payload["dataset"]
        targets = set(payload["target_attributes"])
        correspondences = []
        for column in payload["columns"]:
            target = self.tables.synonyms.get(f"{dataset}.{column}")
            if target is None:
                target = self.tables.synonyms.get(column)
            if target is None and column in targets:
                target = column
            if target is not None and target not in targets:
                target = None
            correspondences.append({"source_column": column, "target_attribute": target or "NONE"})
        return {"correspondences": correspondences}

    def _taxonomy_map(self, payload: Mapping[str, Any]) -> Dict[str, Any]:
        value_set = set(payload["value_set"])
        table = self.tables.taxonomy.get(payload["attribute"], {})
        mappings = []
        for value in payload["values"]:
            if value in value_set:
                target: Optional[str] = value
            else:
                target = table.get(value)
            mappings.append({"value": value, "target": target})
        return {"mappings": mappings}

    def _pair_label(self, payload: Mapping[str, Any]) -> Dict[str, Any]:
        left, right = payload["record_a"], payload["record_b"]
        left_entity = self.tables.entities.get(record_key(left["dataset"], left["id"]))
        right_entity = self.tables.entities.get(record_key(right["dataset"], right["id"]))
        if left_entity is not None and right_entity is not None:
            return {"label": "match" if left_entity == right_entity else "non-match"}
        left_name = normalize_name(left["values"].get(self.name_attribute))
        right_name = normalize_name(right["values"].get(self.name_attribute))
        if not left_name or not right_name:
            return {"label": "non-match"}
        similarity = JaroWinkler.similarity(left_name, right_name, prefix_weight=0.1)
        return {"label": "match" if similarity >= MATCH_SIMILARITY else "non-match"}

    def _entity_of(self, members: List[Mapping[str, Any]]) -> Optional[str]:
        for member in members:
            entity = self.tables.entities.get(record_key(member["dataset"], member["id"]))
            if entity is not None:
                return entity
        return None

    def _select_entities(self, payload: Mapping[str, Any]) -> Dict[str, Any]:
        well_known = (
            set(self.tables.well_known)
            if self.tables.well_known is not None
            else set(self.tables.entity_values)
        )
        selected = [
            cluster["cluster_id"]
            for cluster in payload["clusters"]
            if self._entity_of(cluster["members"]) in well_known
        ]
        return {"selected": selected}

    def _ground_truth(self, payload: Mapping[str, Any]) -> Dict[str, Any]:
        entity = self._entity_of(payload["members"])
        known = self.tables.entity_values.get(entity, {}) if entity is not None else {}
        values = [
            {"attribute": attribute, "value": known[attribute]}
            for attribute in payload["attributes"]
            if attribute in known
        ]
        return {"values": values}

    def _strategy(self, payload: Mapping[str, Any]) -> Dict[str, Any]:
        resolvers = [
            {"attribute": attribute["name"], "resolver": self.tables.strategy[attribute["name"]]}
            for attribute in payload["attributes"]
            if attribute["name"] in self.tables.strategy
        ]
        return {"resolvers": resolvers}
