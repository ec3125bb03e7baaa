"""
Evaluation arithmetic and the end-to-end integration report.
"""

from .evaluation import PRF, macro_average, prf_from_counts, prf_from_sets, round_half_up
from .report import (
    NOT_AVAILABLE,
    IntegrationReport,
    average_density,
    compute_report,
    load_report,
    render_report,
    report_rows,
)

__all__ = [
    "IntegrationReport",
    "NOT_AVAILABLE",
    "PRF",
    "average_density",
    "compute_report",
    "load_report",
    "macro_average",
    "prf_from_counts",
    "prf_from_sets",
    "render_report",
    "report_rows",
    "round_half_up",
]
