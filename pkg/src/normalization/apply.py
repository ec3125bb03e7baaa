"""
Apply normalizer assignments and taxonomy mappings to a dataset.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from src.datamodel import Dataset, Record, Value
from src.datamodel.profiling import value_text

from .assignment import NormalizationMethod, NormalizerAssignment
from .normalizers import DEFAULT_HINTS, UNPARSED, NormalizationHints, normalize_value
from .taxonomy import RETAIN, TaxonomyMapping


@dataclass
class ReportRow:
    columns_touched: int = 0
    values_normalized: int = 0
    values_total: int = 0

    def add(self, other: "ReportRow") -> None:
        self.columns_touched += other.columns_touched
        self.values_normalized += other.values_normalized
        self.values_total += other.values_total


@dataclass
class NormalizationReport:
    """Per (dataset, method) column and cell counts."""

    rows: Dict[Tuple[str, NormalizationMethod], ReportRow] = field(default_factory=dict)

    def row(self, dataset: str, method: NormalizationMethod) -> ReportRow:
        return self.rows.setdefault((dataset, method), ReportRow())

    def merge(self, other: "NormalizationReport") -> "NormalizationReport":
        merged = NormalizationReport()
        for report in (self, other):
            for (dataset, method), row in report.rows.items():
                merged.row(dataset, method).add(row)
        return merged

    def totals(self, method: NormalizationMethod) -> ReportRow:
        total = ReportRow()
        for (_, row_method), row in self.rows.items():
            if row_method is method:
                total.add(row)
        return total

    @property
    def datasets(self) -> List[str]:
        return sorted({dataset for dataset, _ in self.rows})

    def to_dict(self) -> Dict[str, object]:
        return {
            "rows": [
                {
                    "dataset": dataset,
                    "method": method.value,
                    "columns_touched": row.columns_touched,
                    "values_normalized": row.values_normalized,
                    "values_total": row.values_total,
                }
                for (dataset, method), row in sorted(
                    self.rows.items(), key=lambda item: (item[0][0], item[0][1].value)
                )
            ]
        }

    @classmethod
    def from_dict(cls, document: Mapping[str, object]) -> "NormalizationReport":
        report = cls()
        for entry in document["rows"]:  # type: ignore[union-attr]
            report.rows[(entry["dataset"], NormalizationMethod(entry["method"]))] = ReportRow(
                entry["columns_touched"], entry["values_normalized"], entry["values_total"]
            )
        return report

    def save(self, path: Path | str) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")
        return path

    @classmethod
    def load(cls, path: Path | str) -> "NormalizationReport":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def render(self) -> str:
        """Text table: code and taxonomy Col./Norm./Total per dataset plus a total row."""

        header = (
            f"{'Dataset':<22}{'Code Col.':>10}{'Norm.':>10}{'Total':>10}"
            f"{'Tax. Col.':>11}{'Norm.':>10}{'Total':>10}"
        )
        lines = [header]

        def line(label: str, code: ReportRow, taxonomy: ReportRow) -> str:
            return (
                f"{label:<22}{code.columns_touched:>10}{code.values_normalized:>10,}"
                f"{code.values_total:>10,}{taxonomy.columns_touched:>11}"
                f"{taxonomy.values_normalized:>10,}{taxonomy.values_total:>10,}"
            )

        for dataset in self.datasets:
            lines.append(
                line(
                    dataset,
                    self.rows.get((dataset, NormalizationMethod.CODE), ReportRow()),
                    self.rows.get((dataset, NormalizationMethod.TAXONOMY), ReportRow()),
                )
            )
        lines.append(
            line(
                "Total",
                self.totals(NormalizationMethod.CODE),
                self.totals(NormalizationMethod.TAXONOMY),
            )
        )
        return "\n".join(lines) + "\n"


def apply_normalization(
    dataset: Dataset,
    assignments: Iterable[NormalizerAssignment],
    mappings: Iterable[TaxonomyMapping] = (),
    hints: NormalizationHints = DEFAULT_HINTS,
) -> Tuple[Dataset, NormalizationReport]:
    """
    Normalize the assigned columns of ``dataset``.

    A cell counts as normalized when a code normalizer parsed it or a taxonomy
    mapping sent it to a value-set member; UNPARSED and retained cells keep
    their raw value. Columns without an assignment are copied verbatim.
    """

    active: Dict[str, NormalizerAssignment] = {
        assignment.column: assignment
        for assignment in assignments
        if assignment.dataset == dataset.name and assignment.touches
    }
    by_column = {mapping.column: mapping for mapping in mappings if mapping.dataset == dataset.name}
    report = NormalizationReport()
    for assignment in active.values():
        report.row(dataset.name, assignment.method).columns_touched += 1

    records: List[Record] = []
    for record in dataset.records:
        values: Dict[str, Optional[Value]] = dict(record.values)
        for column, assignment in active.items():
            raw = values.get(column)
            if raw is None:
                continue
            row = report.row(dataset.name, assignment.method)
            row.values_total += 1
            if assignment.method is NormalizationMethod.TAXONOMY:
                mapping = by_column.get(column)
                target = mapping.apply(value_text(raw)) if mapping is not None else RETAIN
                if target is not RETAIN:
                    values[column] = target
                    row.values_normalized += 1
                continue
            normalized = normalize_value(raw, assignment.normalizer, hints)
            if normalized is not UNPARSED:
                values[column] = normalized
                row.values_normalized += 1
        records.append(Record(id=record.id, values=values, source=record.source))
    return dataset.with_records(records), report
