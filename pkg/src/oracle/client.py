"""
The oracle gateway: caching, budget, retries, contract repair and the ledger.
"""

from __future__ import annotations

import hashlib
import json
import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
import openai
from pydantic import BaseModel, ValidationError

from src.errors import BudgetExhausted, OracleContractError, OracleError, OracleTransportError

from .cache import ReplyCache
from .embeddings import EmbeddingClient
from .ledger import UsageLedger, UsageSummary
from .models import CONTRACTS, OracleRequest, TaskTag
from .prompts import build_repair_request
from .transports import OracleTransport, TransportReply

logger = logging.getLogger(__name__)

RETRYABLE = (openai.APIError, OracleTransportError, ConnectionError, TimeoutError)


class Oracle:
    """
    Single gateway to completions and embeddings.

    Replies are cached by request hash; cache hits cost nothing. Every
    transport call that returns appends one ledger entry, including repair
    re-prompts.
    """

    def __init__(
        self,
        transport: OracleTransport,
        embedder: EmbeddingClient,
        *,
        ledger: Optional[UsageLedger] = None,
        cache: Optional[ReplyCache] = None,
        budget_micro: Optional[int] = None,
        max_retries: int = 2,
        backoff_seconds: float = 1.0,
        max_concurrency: int = 4,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        self.transport = transport
        self.embedder = embedder
        self.ledger = ledger or UsageLedger()
        self.cache = cache or ReplyCache()
        self.budget_micro = budget_micro
        self.max_retries = max_retries
        self.backoff_seconds = backoff_seconds
        self.max_concurrency = max_concurrency
        self._grounded: Optional[OracleTransport] = None
        self._slots = threading.BoundedSemaphore(max_concurrency)
        self._sleep = sleep

    def register_grounded(self, transport: OracleTransport) -> None:
        """Route search-grounded ground-truth requests through ``transport``."""

        self._grounded = transport

    @property
    def has_grounded(self) -> bool:
        return self._grounded is not None

    def _check_budget(self) -> None:
        if self.budget_micro is not None and self.ledger.total_micro >= self.budget_micro:
            raise BudgetExhausted(
                f"oracle budget of {self.budget_micro} micro-units exhausted "
                f"(spent {self.ledger.total_micro})"
            )

    def _transport_for(self, request: OracleRequest) -> OracleTransport:
        if request.task_tag is TaskTag.FUSION_GROUNDTRUTH_RAG:
            if self._grounded is None:
                raise OracleError("no grounded transport registered")
            return self._grounded
        return self.transport

    def _send(self, transport: OracleTransport, request: OracleRequest) -> str:
        self._check_budget()
        last_error: Optional[BaseException] = None
        for attempt in range(self.max_retries + 1):
            try:
                with self._slots:
                    reply: TransportReply = transport.complete(request)
            except RETRYABLE as exc:
                last_error = exc
                if attempt < self.max_retries:
                    delay = self.backoff_seconds * (2**attempt)
                    logger.warning(
                        "%s call failed (%s); retrying in %.1fs", request.task_tag.value, exc, delay
                    )
                    self._sleep(delay)
                continue
            self.ledger.record(request.task_tag, reply.input_units, reply.output_units)
            return reply.text
        raise OracleTransportError(
            f"{request.task_tag.value} call failed after {self.max_retries + 1} attempts: "
            f"{last_error}"
        ) from last_error

    def invoke(self, request: OracleRequest) -> BaseModel:
        """Return the reply parsed against the task's contract."""

        contract = CONTRACTS[request.task_tag]
        digest = request.digest
        cached = self.cache.get(digest)
        if cached is not None:
            return contract.model_validate_json(cached)

        transport = self._transport_for(request)
        text = self._send(transport, request)
        try:
            parsed = contract.model_validate_json(text)
        except ValidationError as problem:
            logger.warning("%s reply violated its contract; re-prompting", request.task_tag.value)
            repair = build_repair_request(request, text, _describe(problem))
            text = self._send(transport, repair)
            try:
                parsed = contract.model_validate_json(text)
            except ValidationError as exc:
                raise OracleContractError(
                    f"{request.task_tag.value} reply violated its contract after repair: "
                    f"{_describe(exc)}",
                    raw_reply=text,
                ) from exc
        self.cache.put(digest, request.task_tag.value, text)
        return parsed

    def invoke_many(self, requests: Sequence[OracleRequest]) -> List[BaseModel]:
        """
        Invoke through the bounded pool; replies come back in request order.

        Requests with the same digest are sent once. Under a budget the calls run
        one at a time so the ceiling is checked against every recorded cost.
        """

        unique: Dict[str, OracleRequest] = {}
        for request in requests:
            unique.setdefault(request.digest, request)
        workers = self.max_concurrency if self.budget_micro is None else 1
        if len(unique) <= 1 or workers == 1:
            replies = [self.invoke(request) for request in unique.values()]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                replies = list(pool.map(self.invoke, unique.values()))
        by_digest = dict(zip(unique, replies))
        return [by_digest[request.digest] for request in requests]

    def embed(self, texts: Sequence[str]) -> List[np.ndarray]:
        """Embed texts in order; identical texts give identical vectors."""

        if not texts:
            raise ValueError("embed requires at least one text")

        vectors: List[Optional[np.ndarray]] = [None] * len(texts)
        keys: List[Optional[str]] = [None] * len(texts)
        if self.embedder.cacheable:
            for index, text in enumerate(texts):
                keys[index] = _embedding_key(self.embedder.model_name, text)
                cached = self.cache.get(keys[index])
                if cached is not None:
                    vectors[index] = np.asarray(json.loads(cached), dtype=np.float64)

        missing = [index for index, vector in enumerate(vectors) if vector is None]
        if missing:
            self._check_budget()
            batch = [texts[index] for index in missing]
            last_error: Optional[BaseException] = None
            for attempt in range(self.max_retries + 1):
                try:
                    with self._slots:
                        fresh, units = self.embedder.embed_with_usage(batch)
                    break
                except RETRYABLE as exc:
                    last_error = exc
                    if attempt < self.max_retries:
                        self._sleep(self.backoff_seconds * (2**attempt))
            else:
                raise OracleTransportError(f"embedding call failed: {last_error}") from last_error
            if len(fresh) != len(batch):
                raise OracleError(f"embedder returned {len(fresh)} vectors for {len(batch)} texts")
            self.ledger.record(TaskTag.EMBED, units, 0)
            for index, vector in zip(missing, fresh):
                vectors[index] = vector
                if keys[index] is not None:
                    self.cache.put(keys[index], TaskTag.EMBED.value, json.dumps(vector.tolist()))

        dimensions = {vector.shape[0] for vector in vectors}
        if len(dimensions) != 1 or (
            self.embedder.dimension and dimensions != {self.embedder.dimension}
        ):
            raise OracleError(f"embedding dimension mismatch: {sorted(dimensions)}")
        return vectors  # type: ignore[return-value]

    def usage_report(self) -> UsageSummary:
        return self.ledger.summary()


def _embedding_key(model: str, text: str) -> str:
    return hashlib.sha256(f"embed\x1f{model}\x1f{text}".encode("utf-8")).hexdigest()


def _describe(error: ValidationError) -> str:
    return "; ".join(
        f"{'.'.join(str(part) for part in item['loc']) or 'reply'}: {item['msg']}"
        for item in error.errors()
    )
