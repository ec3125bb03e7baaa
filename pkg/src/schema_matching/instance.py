"""
Instance-based matcher: TF-IDF column documents compared by cosine.
"""

from __future__ import annotations

import logging
from typing import List

from sklearn.feature_extraction.text import TfidfVectorizer
from sklearn.metrics.pairwise import cosine_similarity

from src.datamodel import Dataset
from src.datamodel.profiling import value_text

from .models import MatcherKind, SchemaCorrespondence, one_to_one

logger = logging.getLogger(__name__)

DEFAULT_INSTANCE_THRESHOLD = 0.3


def column_document(dataset: Dataset, column: str) -> str:
    """Concatenated non-null values of one column."""

    return " ".join(value_text(value) for value in dataset.column(column) if value is not None)


def match_instances(
    source: Dataset,
    target_reference: Dataset,
    threshold: float = DEFAULT_INSTANCE_THRESHOLD,
) -> List[SchemaCorrespondence]:
    """
    Compare whitespace-tokenized column documents of ``source`` against those of
    a reference table laid out in the target schema.
    """

    if len(target_reference) == 0 or not source.attribute_names:
        return []
    target_columns = [
        name for name in target_reference.attribute_names if name != target_reference.id_attribute
    ]
    source_columns = source.attribute_names
    source_docs = [column_document(source, column) for column in source_columns]
    target_docs = [column_document(target_reference, column) for column in target_columns]
    if not any(source_docs) or not any(target_docs):
        return []

    vectorizer = TfidfVectorizer(tokenizer=str.split, token_pattern=None, lowercase=True)
    matrix = vectorizer.fit_transform(source_docs + target_docs)
    similarities = cosine_similarity(matrix[: len(source_docs)], matrix[len(source_docs) :])

    scored = [
        (float(similarities[row, col]), source_columns[row], target_columns[col])
        for row in range(len(source_columns))
        for col in range(len(target_columns))
    ]
    chosen = one_to_one(scored, threshold)
    logger.debug("Instance matcher kept %d correspondences for %s", len(chosen), source.name)
    return [
        SchemaCorrespondence(
            dataset=source.name,
            source_attribute=column,
            target_attribute=attribute,
            score=min(1.0, max(0.0, score)),
            matcher=MatcherKind.INSTANCE,
        )
        for score, column, attribute in chosen
    ]
