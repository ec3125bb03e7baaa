"""
Structural end-to-end metrics of an integration run and their rendering.
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Literal, Mapping, Optional, Sequence, Sized

from pydantic import BaseModel, Field

from src.datamodel import Dataset, TargetSchema, density
from src.oracle import UsageSummary

from .evaluation import round_half_up

DensityWeighting = Literal["unweighted", "row_weighted"]
ReportFormat = Literal["text", "json"]

NOT_AVAILABLE = "n/a"


class IntegrationReport(BaseModel):
    """
    Size and completeness of the fused output against its inputs.

    Ratios are stored as fractions in full precision; ``None`` marks a metric
    that is undefined for the run (e.g. a gain over an empty largest input).
    """

    data_sources: int
    total_input_records: int
    largest_input: int
    fused_groups: int
    output_records: int
    fusion_ratio: Optional[float] = None
    row_gain_abs: int
    row_gain_pct: Optional[float] = None
    avg_input_density: Optional[float] = None
    output_density: Optional[float] = None
    density_change_pp: Optional[float] = None
    input_records: Dict[str, int] = Field(default_factory=dict)
    runtimes: Optional[Dict[str, Dict[str, float]]] = None
    ledger: Optional[UsageSummary] = None

    @classmethod
    def from_counts(
        cls,
        input_records: Mapping[str, int],
        output_records: int,
        fused_groups: int,
        *,
        avg_input_density: Optional[float] = None,
        output_density: Optional[float] = None,
    ) -> "IntegrationReport":
        """Derive every ratio from published or computed counts."""

        if fused_groups > output_records:
            raise ValueError("fused groups cannot exceed output records")
        largest = max(input_records.values(), default=0)
        gain = output_records - largest
        change = None
        if avg_input_density is not None and output_density is not None:
            change = (output_density - avg_input_density) * 100
        return cls(
            data_sources=len(input_records),
            total_input_records=sum(input_records.values()),
            largest_input=largest,
            fused_groups=fused_groups,
            output_records=output_records,
            fusion_ratio=fused_groups / output_records if output_records else None,
            row_gain_abs=gain,
            row_gain_pct=gain / largest if largest else None,
            avg_input_density=avg_input_density,
            output_density=output_density,
            density_change_pp=change,
            input_records=dict(input_records),
        )


def average_density(
    inputs: Sequence[Dataset], attributes: Sequence[str], weighting: DensityWeighting
) -> Optional[float]:
    if not inputs:
        return None
    densities = [density(dataset, attributes) for dataset in inputs]
    if weighting == "unweighted":
        return sum(densities) / len(densities)
    rows = sum(len(dataset) for dataset in inputs)
    if rows == 0:
        return None
    return sum(value * len(dataset) for value, dataset in zip(densities, inputs)) / rows


def compute_report(
    inputs: Sequence[Dataset],
    clusters: Iterable[Sized],
    fused: Dataset,
    target: TargetSchema,
    *,
    weighting: DensityWeighting = "unweighted",
    runtimes: Optional[Mapping[str, Mapping[str, float]]] = None,
    ledger: Optional[UsageSummary] = None,
) -> IntegrationReport:
    """
    Report over the target-projected inputs and the fused output.

    Densities use the non-id target attributes as basis; ``clusters`` only
    needs sizes, so a fused group is any cluster with more than one member.
    """

    basis = [attribute.name for attribute in target.fused_attributes]
    report = IntegrationReport.from_counts(
        {dataset.name: len(dataset) for dataset in inputs},
        len(fused),
        sum(1 for cluster in clusters if len(cluster) > 1),
        avg_input_density=average_density(inputs, basis, weighting),
        output_density=density(fused, basis) if len(fused) else None,
    )
    report.runtimes = {step: dict(times) for step, times in runtimes.items()} if runtimes else None
    report.ledger = ledger
    return report


def _count(value: int, signed: bool = False) -> str:
    return f"{value:+,}" if signed else f"{value:,}"


def _percent(value: Optional[float], signed: bool = False) -> str:
    if value is None:
        return NOT_AVAILABLE
    rounded = round_half_up(value * 100, 1)
    return f"{rounded:+.1f}%" if signed else f"{rounded:.1f}%"


def _points(value: Optional[float]) -> str:
    if value is None:
        return NOT_AVAILABLE
    return f"{round_half_up(value, 1):+.1f}pp"


def report_rows(report: IntegrationReport) -> List[tuple[str, str]]:
    """Metric rows in end-to-end table order; a blank label separates groups."""

    return [
        ("Data Sources", _count(report.data_sources)),
        ("Total Input Records", _count(report.total_input_records)),
        ("Fused Record Groups", _count(report.fused_groups)),
        ("Output Records", _count(report.output_records)),
        ("Fusion Ratio", _percent(report.fusion_ratio)),
        ("", ""),
        (
            "Row Gain vs. Largest",
            _count(report.row_gain_abs, signed=True)
            if report.largest_input
            else NOT_AVAILABLE,
        ),
        ("Row Gain %", _percent(report.row_gain_pct, signed=True)),
        ("", ""),
        ("Avg. Input Density", _percent(report.avg_input_density)),
        ("Output Density", _percent(report.output_density)),
        ("Density Change", _points(report.density_change_pp)),
    ]


def _render_text(report: IntegrationReport) -> str:
    lines = [f"{'Metric':<24}{'Value':>12}"]
    for label, value in report_rows(report):
        lines.append(f"{label:<24}{value:>12}" if label else "-" * 36)
    if report.runtimes:
        lines.append("")
        lines.append(f"{'Step':<24}{'Config s':>12}{'Exec s':>12}")
        for step, times in report.runtimes.items():
            lines.append(
                f"{step:<24}{times.get('configuration', 0.0):>12.1f}"
                f"{times.get('execution', 0.0):>12.1f}"
            )
    if report.ledger is not None:
        lines.append("")
        lines.append(report.ledger.render().rstrip("\n"))
    return "\n".join(lines) + "\n"


def render_report(report: IntegrationReport, fmt: ReportFormat = "text") -> bytes:
    """Text table or lossless JSON document, UTF-8 encoded."""

    if fmt == "text":
        return _render_text(report).encode("utf-8")
    if fmt == "json":
        return (report.model_dump_json(indent=2) + "\n").encode("utf-8")
    raise ValueError(f"unknown report format {fmt!r}")


def load_report(payload: bytes | str) -> IntegrationReport:
    return IntegrationReport.model_validate_json(payload)
