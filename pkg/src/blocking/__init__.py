"""
Blocking: candidate record pairs from embedding nearest neighbours.
"""

from .candidates import (
    CandidatePair,
    RecordRef,
    embed_records,
    generate_candidates,
    load_pool,
    save_pool,
)
from .text import RecordText, RecordTextBuilder

__all__ = [
    "CandidatePair",
    "RecordRef",
    "RecordText",
    "RecordTextBuilder",
    "embed_records",
    "generate_candidates",
    "load_pool",
    "save_pool",
]
