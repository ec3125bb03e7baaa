"""
Tabular data model for the integration engine.

Datasets, records and the target schema are the shared vocabulary of every
later layer; profiling and density measures live alongside them.
"""

from .countries import lookup_country
from .io import (
    NULL_MARKERS,
    clean_cell,
    coerce_value,
    format_value,
    load_dataset,
    load_target_schema,
    project,
    save_target_schema,
    write_dataset,
)
from .models import (
    SYNTHESIZE_ID,
    SYNTHETIC_ID_ATTRIBUTE,
    AttributeDescriptor,
    ColumnProfile,
    Dataset,
    Record,
    SemanticType,
    TargetSchema,
    Value,
    ValueType,
    density,
)
from .profiling import profile_column, profile_dataset, profile_values, sniff_value, strip_currency

__all__ = [
    "AttributeDescriptor",
    "ColumnProfile",
    "Dataset",
    "NULL_MARKERS",
    "Record",
    "SYNTHESIZE_ID",
    "SYNTHETIC_ID_ATTRIBUTE",
    "SemanticType",
    "TargetSchema",
    "Value",
    "ValueType",
    "clean_cell",
    "coerce_value",
    "density",
    "format_value",
    "load_dataset",
    "load_target_schema",
    "lookup_country",
    "profile_column",
    "profile_dataset",
    "profile_values",
    "project",
    "save_target_schema",
    "sniff_value",
    "strip_currency",
    "write_dataset",
]
