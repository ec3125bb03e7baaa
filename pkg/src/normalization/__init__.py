"""
Value normalization: code-based normalizers and oracle taxonomy mappings.
"""

from .apply import NormalizationReport, ReportRow, apply_normalization
from .assignment import (
    NormalizationMethod,
    NormalizerAssignment,
    assign_normalizers,
    choose_normalizer,
)
from .normalizers import (
    DEFAULT_HINTS,
    UNPARSED,
    NormalizationHints,
    NormalizerKind,
    normalize_value,
    parse_date,
    parse_duration,
    parse_number,
    split_list,
)
from .taxonomy import RETAIN, TaxonomyMapping, distinct_values, map_taxonomy

__all__ = [
    "DEFAULT_HINTS",
    "NormalizationHints",
    "NormalizationMethod",
    "NormalizationReport",
    "NormalizerAssignment",
    "NormalizerKind",
    "RETAIN",
    "ReportRow",
    "TaxonomyMapping",
    "UNPARSED",
    "apply_normalization",
    "assign_normalizers",
    "choose_normalizer",
    "distinct_values",
    "map_taxonomy",
    "normalize_value",
    "parse_date",
    "parse_duration",
    "parse_number",
    "split_list",
]
