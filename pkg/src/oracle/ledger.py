"""
Usage ledger in integer micro-currency units.
"""

from __future__ import annotations

import json
import threading
from dataclasses import asdict, dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional

from pydantic import BaseModel

from .models import TaskTag

MICRO = 1_000_000

COST_ROWS: Dict[str, tuple[TaskTag, ...]] = {
    "Schema Matching": (TaskTag.SCHEMA_MATCH,),
    "Normalization": (TaskTag.TAXONOMY_MAP,),
    "Training Set Generation": (TaskTag.PAIR_LABEL, TaskTag.EMBED),
    "Fusion Validation LLM": (
        TaskTag.FUSION_SELECT_ENTITIES,
        TaskTag.FUSION_GROUNDTRUTH,
        TaskTag.FUSION_STRATEGY,
    ),
    "Fusion Validation RAG": (TaskTag.FUSION_GROUNDTRUTH_RAG,),
}


@dataclass(frozen=True, slots=True)
class UnitPrice:
    """Micro-currency per million input/output units plus a flat per-call fee."""

    input_per_million: int = 0
    output_per_million: int = 0
    per_call: int = 0

    def cost(self, input_units: int, output_units: int) -> int:
        numerator = input_units * self.input_per_million + output_units * self.output_per_million
        return (numerator + MICRO // 2) // MICRO + self.per_call


@dataclass(frozen=True, slots=True)
class LedgerEntry:
    task_tag: TaskTag
    input_units: int
    output_units: int
    cost_micro: int

    def to_dict(self) -> Dict[str, object]:
        payload = asdict(self)
        payload["task_tag"] = self.task_tag.value
        return payload


class UsageSummary(BaseModel):
    """Per-task and per-cost-row aggregates of a ledger."""

    per_task: Dict[str, int]
    calls_per_task: Dict[str, int]
    per_row: Dict[str, int]
    total_micro: int

    def render(self) -> str:
        lines = [f"{'Step':<26}{'Cost':>10}"]
        for row, micro in self.per_row.items():
            lines.append(f"{row:<26}{format_currency(micro):>10}")
        lines.append(f"{'Total':<26}{format_currency(self.total_micro):>10}")
        return "\n".join(lines) + "\n"


def format_currency(micro: int) -> str:
    cents = (Decimal(micro) / Decimal(MICRO)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)
    return f"${cents}"


def to_micro(amount: str | Decimal) -> int:
    """Convert a decimal currency amount ("1.33") to micro-units exactly."""

    return int((Decimal(str(amount)) * MICRO).to_integral_value(rounding=ROUND_HALF_UP))


class UsageLedger:
    """Thread-safe append-only list of oracle usage entries."""

    def __init__(
        self,
        prices: Optional[Mapping[TaskTag, UnitPrice]] = None,
        entries: Iterable[LedgerEntry] = (),
    ) -> None:
        self._prices = dict(prices or {})
        self._entries: List[LedgerEntry] = list(entries)
        self._lock = threading.Lock()

    @property
    def entries(self) -> List[LedgerEntry]:
        with self._lock:
            return list(self._entries)

    def price(self, task_tag: TaskTag) -> UnitPrice:
        return self._prices.get(task_tag, UnitPrice())

    def record(self, task_tag: TaskTag, input_units: int, output_units: int) -> LedgerEntry:
        entry = LedgerEntry(
            task_tag=task_tag,
            input_units=input_units,
            output_units=output_units,
            cost_micro=self.price(task_tag).cost(input_units, output_units),
        )
        self.append(entry)
        return entry

    def append(self, entry: LedgerEntry) -> None:
        with self._lock:
            self._entries.append(entry)

    @property
    def total_micro(self) -> int:
        with self._lock:
            return sum(entry.cost_micro for entry in self._entries)

    def summary(self) -> UsageSummary:
        entries = self.entries
        per_task: Dict[str, int] = {}
        calls: Dict[str, int] = {}
        for entry in entries:
            tag = entry.task_tag.value
            per_task[tag] = per_task.get(tag, 0) + entry.cost_micro
            calls[tag] = calls.get(tag, 0) + 1
        per_row = {
            row: sum(per_task.get(tag.value, 0) for tag in tags) for row, tags in COST_ROWS.items()
        }
        return UsageSummary(
            per_task=dict(sorted(per_task.items())),
            calls_per_task=dict(sorted(calls.items())),
            per_row=per_row,
            total_micro=sum(entry.cost_micro for entry in entries),
        )

    def save(self, path: Path | str, *, since: int = 0) -> Path:
        """Append entries from index ``since`` onward as JSON lines."""

        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("a", encoding="utf-8") as handle:
            for entry in self.entries[since:]:
                handle.write(json.dumps(entry.to_dict(), sort_keys=True) + "\n")
        return path

    @classmethod
    def load(
        cls, path: Path | str, prices: Optional[Mapping[TaskTag, UnitPrice]] = None
    ) -> "UsageLedger":
        path = Path(path)
        entries: List[LedgerEntry] = []
        if path.is_file():
            for line in path.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                document = json.loads(line)
                entries.append(
                    LedgerEntry(
                        task_tag=TaskTag(document["task_tag"]),
                        input_units=int(document["input_units"]),
                        output_units=int(document["output_units"]),
                        cost_micro=int(document["cost_micro"]),
                    )
                )
        return cls(prices=prices, entries=entries)
