"""
Embedding client abstractions.
"""

from __future__ import annotations

import hashlib
from abc import ABC, abstractmethod
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np
from openai import OpenAI

from .transports import estimate_units

EMPTY_TEXT_FEATURE = "\x00empty"


class EmbeddingClient(ABC):
    """Interface for services that convert text into dense vectors."""

    dimension: int
    model_name: str
    cacheable: bool = False

    @abstractmethod
    def embed_with_usage(self, texts: Sequence[str]) -> Tuple[List[np.ndarray], int]:
        """Return embeddings for the provided texts and the input units consumed."""

    def embed_documents(self, texts: Sequence[str]) -> List[np.ndarray]:
        vectors, _ = self.embed_with_usage(texts)
        return vectors


class HashedNgramEmbeddingClient(EmbeddingClient):
    """
    Deterministic embedding client over hashed character trigrams.

    Texts are lowercased and padded with one space on each side; every trigram
    increments one sha256-addressed bucket. Vectors are unit-normalized, so
    texts sharing many trigrams have high cosine similarity.
    """

    def __init__(self, dimension: int = 256) -> None:
        self.dimension = dimension
        self.model_name = f"hashed-trigram-{dimension}"

    def embed_with_usage(self, texts: Sequence[str]) -> Tuple[List[np.ndarray], int]:
        vectors = [self._embed(text) for text in texts]
        return vectors, sum(estimate_units(text) for text in texts)

    def _embed(self, text: str) -> np.ndarray:
        vector = np.zeros(self.dimension, dtype=np.float64)
        for feature in self._features(text):
            digest = hashlib.sha256(feature.encode("utf-8")).digest()
            vector[int.from_bytes(digest[:8], "big") % self.dimension] += 1.0
        # Normalize for cosine similarity
        norm = np.linalg.norm(vector)
        if norm > 0:
            vector = vector / norm
        return vector

    @staticmethod
    def _features(text: str) -> List[str]:
        lowered = " ".join(text.lower().split())
        if not lowered:
            return [EMPTY_TEXT_FEATURE]
        padded = f" {lowered} "
        return [padded[index : index + 3] for index in range(len(padded) - 2)]


class OpenAIEmbeddingClient(EmbeddingClient):
    """Embedding client backed by an OpenAI-compatible embeddings API."""

    cacheable = True

    def __init__(
        self,
        *,
        api_key: str,
        model: str,
        api_base: str | None = None,
        dimension: int | None = None,
        client: Optional[Any] = None,
    ) -> None:
        if client is None:
            client_kwargs = {"api_key": api_key, "max_retries": 0}
            if api_base:
                client_kwargs["base_url"] = api_base
            client = OpenAI(**client_kwargs)
        self._client = client
        self.model_name = model
        self.dimension = dimension or 0

    def embed_with_usage(self, texts: Sequence[str]) -> Tuple[List[np.ndarray], int]:
        if not texts:
            return [], 0

        response = self._client.embeddings.create(model=self.model_name, input=list(texts))
        embeddings = [np.asarray(item.embedding, dtype=np.float64) for item in response.data]

        if not self.dimension and embeddings:
            self.dimension = embeddings[0].shape[0]

        usage = getattr(response, "usage", None)
        units = int(usage.prompt_tokens) if usage is not None else sum(map(estimate_units, texts))
        return embeddings, units
