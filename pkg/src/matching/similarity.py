"""
String similarity metrics in [0, 1].

Empty-vs-empty compares as 1.0 and empty-vs-non-empty as 0.0 for every metric.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from typing import Callable, Dict, List, Sequence

from rapidfuzz.distance import JaroWinkler, Levenshtein

Metric = Callable[[str, str], float]

_CAMEL_BOUNDARY = re.compile(r"(?<=[a-z0-9])(?=[A-Z])|(?<=[A-Z])(?=[A-Z][a-z])")
_LABEL_SEPARATORS = re.compile(r"[\s_\-]+")


def _degenerate(a: str, b: str) -> float | None:
    if not a and not b:
        return 1.0
    if not a or not b:
        return 0.0
    return None


def levenshtein_similarity(a: str, b: str) -> float:
    """``1 - distance / max(len)``."""

    edge = _degenerate(a, b)
    if edge is not None:
        return edge
    return 1.0 - Levenshtein.distance(a, b) / max(len(a), len(b))


def jaccard_tokens(a: str, b: str) -> float:
    """Jaccard over whitespace tokens."""

    left, right = set(a.split()), set(b.split())
    edge = _degenerate(" ".join(left), " ".join(right))
    if edge is not None:
        return edge
    return len(left & right) / len(left | right)


def jaro_winkler(a: str, b: str) -> float:
    """Jaro-Winkler with prefix scale 0.1 over at most four prefix characters."""

    edge = _degenerate(a, b)
    if edge is not None:
        return edge
    return JaroWinkler.similarity(a, b, prefix_weight=0.1)


def char_trigrams(text: str) -> Counter[str]:
    if len(text) < 3:
        return Counter([text])
    return Counter(text[index : index + 3] for index in range(len(text) - 2))


def cosine_trigrams(a: str, b: str) -> float:
    """Cosine over character-trigram term-frequency vectors."""

    edge = _degenerate(a, b)
    if edge is not None:
        return edge
    left, right = char_trigrams(a), char_trigrams(b)
    dot = sum(count * right[gram] for gram, count in left.items())
    if dot == 0:
        return 0.0
    norm = sum(count * count for count in left.values()) * sum(
        count * count for count in right.values()
    )
    return min(1.0, dot / math.sqrt(norm))


STRING_METRICS: Dict[str, Metric] = {
    "levenshtein-sim": levenshtein_similarity,
    "jaccard-token": jaccard_tokens,
    "jaro-winkler": jaro_winkler,
    "cosine-tfidf-char3": cosine_trigrams,
}


def string_similarity(a: str, b: str, metric: str) -> float:
    try:
        function = STRING_METRICS[metric]
    except KeyError as exc:
        raise ValueError(f"unsupported similarity metric {metric}") from exc
    return function(a, b)


def split_label(label: str) -> List[str]:
    """Tokenize an attribute label on whitespace, "_", "-" and camelCase; lowercase."""

    spaced = _CAMEL_BOUNDARY.sub(" ", label)
    return [token.lower() for token in _LABEL_SEPARATORS.split(spaced) if token]


def monge_elkan(outer: Sequence[str], inner: Sequence[str], metric: Metric = jaro_winkler) -> float:
    """
    Mean over ``outer`` tokens of the best ``metric`` score against ``inner``.

    Not symmetric: the first argument drives the average.
    """

    if not outer and not inner:
        return 1.0
    if not outer or not inner:
        return 0.0
    return sum(max(metric(token, other) for other in inner) for token in outer) / len(outer)
