"""
Oracle layer: structured completions and embeddings behind one gateway.
"""

from .cache import ReplyCache
from .client import Oracle
from .embeddings import EmbeddingClient, HashedNgramEmbeddingClient, OpenAIEmbeddingClient
from .factory import build_oracle, unit_prices
from .ledger import (
    COST_ROWS,
    MICRO,
    LedgerEntry,
    UnitPrice,
    UsageLedger,
    UsageSummary,
    format_currency,
    to_micro,
)
from .mock import MockTables, MockTransport, normalize_name, record_key
from .models import (
    CONTRACTS,
    GroundTruthReply,
    OracleRequest,
    PairLabelReply,
    SchemaMatchReply,
    SelectEntitiesReply,
    StrategyReply,
    TaskTag,
    TaxonomyReply,
    canonical_json,
    contract_for,
)
from .prompts import build_request, render_prompt
from .remote import OpenAIChatTransport
from .transports import OracleTransport, TransportReply, estimate_units

__all__ = [
    "CONTRACTS",
    "COST_ROWS",
    "EmbeddingClient",
    "GroundTruthReply",
    "HashedNgramEmbeddingClient",
    "LedgerEntry",
    "MICRO",
    "MockTables",
    "MockTransport",
    "OpenAIChatTransport",
    "OpenAIEmbeddingClient",
    "Oracle",
    "OracleRequest",
    "OracleTransport",
    "PairLabelReply",
    "ReplyCache",
    "SchemaMatchReply",
    "SelectEntitiesReply",
    "StrategyReply",
    "TaskTag",
    "TaxonomyReply",
    "TransportReply",
    "UnitPrice",
    "UsageLedger",
    "UsageSummary",
    "build_oracle",
    "build_request",
    "canonical_json",
    "contract_for",
    "estimate_units",
    "format_currency",
    "normalize_name",
    "record_key",
    "render_prompt",
    "to_micro",
]
