"""
Build an oracle gateway from a run configuration.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Dict, Optional

from src.config import RunConfig, load_openai_settings
from src.errors import ConfigurationError

from .cache import ReplyCache
from .client import Oracle
from .embeddings import HashedNgramEmbeddingClient, OpenAIEmbeddingClient
from .ledger import UnitPrice, UsageLedger
from .mock import MockTables, MockTransport
from .models import TaskTag
from .remote import OpenAIChatTransport

logger = logging.getLogger(__name__)


def unit_prices(config: RunConfig) -> Dict[TaskTag, UnitPrice]:
    prices: Dict[TaskTag, UnitPrice] = {}
    for tag, price in config.oracle.prices.items():
        try:
            task = TaskTag(tag)
        except ValueError as exc:
            raise ConfigurationError(f"unknown task tag in oracle prices: {tag}") from exc
        prices[task] = UnitPrice(price.input_per_million, price.output_per_million, price.per_call)
    return prices


def build_oracle(config: RunConfig, *, ledger_path: Optional[Path] = None) -> Oracle:
    """Mock or remote gateway with the configured cache, ledger and budget."""

    settings = config.oracle
    ledger = UsageLedger.load(ledger_path, unit_prices(config)) if ledger_path else None
    if ledger is None:
        ledger = UsageLedger(unit_prices(config))
    cache = ReplyCache(config.cache_path)

    if settings.mode == "mock":
        tables = MockTables.load(settings.mock_tables) if settings.mock_tables else MockTables()
        transport = MockTransport(tables, name_attribute=settings.name_attribute)
        embedder = HashedNgramEmbeddingClient(settings.embedding_dimension)
    else:
        openai_settings = load_openai_settings(required=True)
        transport = OpenAIChatTransport.from_settings(
            openai_settings, model=settings.chat_model, endpoint=settings.endpoint
        )
        embedder = OpenAIEmbeddingClient(
            api_key=openai_settings.api_key,
            model=settings.embed_model or openai_settings.embed_model,
            api_base=settings.endpoint or openai_settings.api_base,
        )

    oracle = Oracle(
        transport,
        embedder,
        ledger=ledger,
        cache=cache,
        budget_micro=settings.budget_micro,
        max_retries=settings.max_retries,
        backoff_seconds=settings.backoff_seconds,
        max_concurrency=settings.max_concurrency,
    )
    if settings.grounded:
        if settings.mode != "mock":
            raise ConfigurationError("no search-grounded transport is available in remote mode")
        oracle.register_grounded(
            MockTransport(tables, name_attribute=settings.name_attribute, grounded=True)
        )
    logger.debug("Oracle ready: mode=%s, cached replies=%d", settings.mode, len(cache))
    return oracle
