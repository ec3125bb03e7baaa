"""
Embedding-based candidate generation with exact k-nearest-neighbour scans.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, TypeVar

import numpy as np
import pandas as pd

from src.datamodel import Dataset
from src.oracle import Oracle

from .text import RecordText, RecordTextBuilder

logger = logging.getLogger(__name__)

T = TypeVar("T")

DEFAULT_EMBED_BATCH_SIZE = 512
# Cells per similarity block held in memory at once.
_BLOCK_CELLS = 4_000_000


@dataclass(frozen=True, slots=True)
class RecordRef:
    dataset: str
    id: str

    def token(self) -> str:
        return f"{self.dataset}:{self.id}"


@dataclass(frozen=True, slots=True)
class CandidatePair:
    record_a: RecordRef
    record_b: RecordRef
    similarity: float
    rank_from_a: int

    def __post_init__(self) -> None:
        if self.record_a.dataset == self.record_b.dataset:
            raise ValueError("candidate pairs link records of two different datasets")
        if self.rank_from_a < 1:
            raise ValueError("rank_from_a starts at 1")

    @property
    def key(self) -> Tuple[str, str]:
        return (self.record_a.id, self.record_b.id)


def _batched(iterable: Iterable[T], size: int) -> Iterator[List[T]]:
    batch: List[T] = []
    for item in iterable:
        batch.append(item)
        if len(batch) >= size:
            yield batch
            batch = []
    if batch:
        yield batch


def embed_records(
    dataset: Dataset,
    oracle: Oracle,
    template: Optional[Sequence[str]] = None,
    batch_size: int = DEFAULT_EMBED_BATCH_SIZE,
) -> Dict[str, np.ndarray]:
    """Embed every record's text in batches; returns id -> vector."""

    builder = RecordTextBuilder.for_dataset(dataset, template)
    vectors: Dict[str, np.ndarray] = {}
    batch: List[RecordText]
    for batch in _batched(builder.iter_texts(dataset), batch_size):
        embeddings = oracle.embed([item.text for item in batch])
        for item, vector in zip(batch, embeddings):
            vectors[item.record_id] = np.asarray(vector, dtype=np.float64)
    logger.debug("Embedded %d records of %s", len(vectors), dataset.name)
    return vectors


def _unit_rows(dataset: Dataset, vectors: Dict[str, np.ndarray]) -> np.ndarray:
    matrix = np.vstack([vectors[record.id] for record in dataset.records]).astype(np.float64)
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return matrix / norms


def _top_k(block: np.ndarray, k: int) -> np.ndarray:
    """Column indices of the k largest entries per row; ties by lower index."""

    order = np.argsort(-block, axis=1, kind="stable")
    return order[:, :k]


def generate_candidates(
    dataset_a: Dataset,
    dataset_b: Dataset,
    k: int,
    vectors_a: Dict[str, np.ndarray],
    vectors_b: Dict[str, np.ndarray],
) -> List[CandidatePair]:
    """
    Union of each record's top-k neighbours in the other dataset.

    The pair is canonicalized so ``record_a`` comes from the dataset whose name
    sorts first; ``rank_from_a`` is the rank of ``record_b`` in ``record_a``'s
    full similarity row. Output is sorted by (-similarity, id_a, id_b).
    """

    if k < 1:
        raise ValueError("k must be at least 1")
    if dataset_a.name == dataset_b.name:
        raise ValueError("candidate generation needs two different datasets")
    if dataset_b.name < dataset_a.name:
        dataset_a, dataset_b = dataset_b, dataset_a
        vectors_a, vectors_b = vectors_b, vectors_a
    if len(dataset_a) == 0 or len(dataset_b) == 0:
        return []

    left = _unit_rows(dataset_a, vectors_a)
    right = _unit_rows(dataset_b, vectors_b)

    wanted: Dict[int, set[int]] = {}
    step = max(1, _BLOCK_CELLS // len(dataset_a))
    for start in range(0, len(dataset_b), step):
        block = right[start : start + step] @ left.T
        for offset, neighbours in enumerate(_top_k(block, min(k, len(dataset_a)))):
            for a_index in neighbours:
                wanted.setdefault(int(a_index), set()).add(start + offset)

    found: Dict[Tuple[int, int], Tuple[float, int]] = {}
    step = max(1, _BLOCK_CELLS // len(dataset_b))
    for start in range(0, len(dataset_a), step):
        block = left[start : start + step] @ right.T
        order = np.argsort(-block, axis=1, kind="stable")
        ranks = np.empty_like(order)
        rows = np.arange(order.shape[0])[:, None]
        ranks[rows, order] = np.arange(order.shape[1])[None, :]
        for offset in range(block.shape[0]):
            a_index = start + offset
            partners = set(int(index) for index in order[offset, :k])
            partners |= wanted.get(a_index, set())
            for b_index in partners:
                similarity = float(np.clip(block[offset, b_index], -1.0, 1.0))
                found[(a_index, b_index)] = (similarity, int(ranks[offset, b_index]) + 1)

    pairs = [
        CandidatePair(
            record_a=RecordRef(dataset_a.name, dataset_a.records[a_index].id),
            record_b=RecordRef(dataset_b.name, dataset_b.records[b_index].id),
            similarity=similarity,
            rank_from_a=rank,
        )
        for (a_index, b_index), (similarity, rank) in found.items()
    ]
    pairs.sort(key=lambda pair: (-pair.similarity, pair.record_a.id, pair.record_b.id))
    logger.info(
        "Blocking %s x %s with k=%d: %d candidate pairs",
        dataset_a.name,
        dataset_b.name,
        k,
        len(pairs),
    )
    return pairs


POOL_COLUMNS = ["dataset_a", "id_a", "dataset_b", "id_b", "similarity", "rank_from_a"]


def save_pool(pairs: Sequence[CandidatePair], path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(
        [
            (
                pair.record_a.dataset,
                pair.record_a.id,
                pair.record_b.dataset,
                pair.record_b.id,
                pair.similarity,
                pair.rank_from_a,
            )
            for pair in pairs
        ],
        columns=POOL_COLUMNS,
    )
    frame.to_csv(path, index=False, encoding="utf-8")
    return path


def load_pool(path: Path | str) -> List[CandidatePair]:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"candidate pool not found: {path}")
    frame = pd.read_csv(
        path,
        dtype={"dataset_a": str, "id_a": str, "dataset_b": str, "id_b": str},
        keep_default_na=False,
    )
    return [
        CandidatePair(
            record_a=RecordRef(row.dataset_a, row.id_a),
            record_b=RecordRef(row.dataset_b, row.id_b),
            similarity=float(row.similarity),
            rank_from_a=int(row.rank_from_a),
        )
        for row in frame.itertuples(index=False)
    ]
