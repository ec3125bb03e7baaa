"""
Autointegrate package root.

Sub-packages cover the data model, the oracle gateway, every integration step
from schema matching to fusion, the end-to-end report, the pipeline CLI and a
synthetic benchmark generator.
"""

__all__ = [
    "blocking",
    "clustering",
    "config",
    "datamodel",
    "fusion",
    "matching",
    "metrics",
    "normalization",
    "oracle",
    "pipeline",
    "schema_matching",
    "synthetic",
]
