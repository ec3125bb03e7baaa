"""
Column profiling: per-value type sniffers and a majority vote per column.
"""

from __future__ import annotations

import re
from collections import Counter
from datetime import date
from typing import Callable, List, Optional, Sequence, Tuple

from .countries import lookup_country
from .models import ColumnProfile, Dataset, SemanticType, Value

CURRENCY_SYMBOLS = "$€£¥"
CURRENCY_CODES = ("usd", "eur", "gbp", "jpy", "chf", "cny", "cad", "aud")
SCALE_WORDS = ("thousand", "million", "billion", "mio", "bn", "mm", "k", "m", "b")

_CURRENCY_PREFIX = re.compile(r"^(?:%s)\s*" % "|".join(CURRENCY_CODES), re.IGNORECASE)
_CURRENCY_SUFFIX = re.compile(r"\s*(?:%s)$" % "|".join(CURRENCY_CODES), re.IGNORECASE)
_NUMBER = re.compile(
    r"^[-+]?\d[\d.,' ]*(?:\s*(?:%s))?$" % "|".join(SCALE_WORDS),
    re.IGNORECASE,
)
_DURATION = (
    re.compile(r"^\d{1,3}:\d{2}(?::\d{2})?$"),
    re.compile(r"^P?T(?:\d+H)?(?:\d+M)?(?:\d+(?:\.\d+)?S)?$", re.IGNORECASE),
    re.compile(r"^\d+\s*h(?:ours?|rs?)?(?:\s*\d+\s*m(?:in(?:utes?|s)?)?)?$", re.IGNORECASE),
    re.compile(r"^\d+(?:\.\d+)?\s*(?:min|mins|minutes|sec|secs|seconds)$", re.IGNORECASE),
)
_MONTHS = (
    "jan|feb|mar|apr|may|jun|jul|aug|sep|sept|oct|nov|dec|january|february|march|april"
    "|june|july|august|september|october|november|december"
)
_DATE = (
    re.compile(r"^\d{4}-\d{1,2}-\d{1,2}(?:[T ][\d:.]+Z?)?$"),
    re.compile(r"^\d{4}-\d{1,2}$"),
    re.compile(r"^\d{1,2}[./]\d{1,2}[./]\d{2,4}$"),
    re.compile(r"^\d{4}/\d{1,2}/\d{1,2}$"),
    re.compile(r"^(?:%s)\.? \d{1,2},? \d{4}$" % _MONTHS, re.IGNORECASE),
    re.compile(r"^\d{1,2} (?:%s)\.?,? \d{4}$" % _MONTHS, re.IGNORECASE),
    re.compile(r"^(?:%s)\.? \d{4}$" % _MONTHS, re.IGNORECASE),
)
_LIST_DELIMITERS = (";", "|")


def strip_currency(text: str) -> str:
    """Remove currency symbols and leading/trailing currency codes ("MEUR" keeps "M")."""

    stripped = text.strip().strip(CURRENCY_SYMBOLS).strip()
    stripped = _CURRENCY_PREFIX.sub("", stripped)
    stripped = _CURRENCY_SUFFIX.sub("", stripped)
    return stripped.strip(CURRENCY_SYMBOLS).strip()


def looks_like_duration(text: str) -> bool:
    if not any(character.isdigit() for character in text):
        return False
    compact = text.strip()
    if compact.isdigit():
        return False
    return any(pattern.match(compact) for pattern in _DURATION)


def looks_like_date(text: str) -> bool:
    return any(pattern.match(text.strip()) for pattern in _DATE)


def looks_like_number(text: str) -> bool:
    return bool(_NUMBER.match(strip_currency(text)))


def looks_like_country(text: str) -> bool:
    return lookup_country(text) is not None


def looks_like_list(text: str) -> bool:
    stripped = text.strip()
    if stripped.startswith("[") and stripped.endswith("]"):
        return True
    return any(
        delimiter in stripped
        and len([part for part in stripped.split(delimiter) if part.strip()]) >= 2
        for delimiter in _LIST_DELIMITERS
    )


# Evaluated in order; the first sniffer that accepts a value decides its type.
SNIFFERS: Tuple[Tuple[SemanticType, Callable[[str], bool]], ...] = (
    (SemanticType.DURATION, looks_like_duration),
    (SemanticType.DATE, looks_like_date),
    (SemanticType.NUMBER, looks_like_number),
    (SemanticType.COUNTRY, looks_like_country),
    (SemanticType.LIST, looks_like_list),
)
_PRECEDENCE = [semantic for semantic, _ in SNIFFERS] + [SemanticType.STRING]


def sniff_value(value: Value) -> SemanticType:
    """Semantic type of a single non-null value."""

    if isinstance(value, bool):
        return SemanticType.STRING
    if isinstance(value, (int, float)):
        return SemanticType.NUMBER
    if isinstance(value, date):
        return SemanticType.DATE
    if isinstance(value, list):
        return SemanticType.LIST
    for semantic, sniffer in SNIFFERS:
        if sniffer(value):
            return semantic
    return SemanticType.STRING


def value_text(value: Value) -> str:
    if isinstance(value, list):
        return "; ".join(value)
    if isinstance(value, date):
        return value.isoformat()
    return str(value)


def categorical_limit(rows: int) -> int:
    return max(20, int(0.05 * rows))


def profile_values(column: str, values: Sequence[Optional[Value]]) -> ColumnProfile:
    rows = len(values)
    present = [value for value in values if value is not None]
    if not present:
        return ColumnProfile(column, SemanticType.STRING, 0, 1.0 if rows else 0.0, ())

    votes = Counter(sniff_value(value) for value in present)
    detected = max(votes, key=lambda semantic: (votes[semantic], -_PRECEDENCE.index(semantic)))

    distinct: List[str] = []
    seen = set()
    for value in present:
        text = value_text(value)
        if text not in seen:
            seen.add(text)
            distinct.append(text)
    if detected is SemanticType.STRING and len(distinct) <= categorical_limit(rows):
        detected = SemanticType.CATEGORICAL

    return ColumnProfile(
        column=column,
        detected_type=detected,
        unique_count=len(distinct),
        null_fraction=(rows - len(present)) / rows,
        examples=tuple(distinct[:10]),
    )


def profile_column(dataset: Dataset, column: str) -> ColumnProfile:
    """Detect the semantic type of one column by majority vote over its values."""

    return profile_values(column, dataset.column(column))


def profile_dataset(dataset: Dataset) -> List[ColumnProfile]:
    return [profile_column(dataset, name) for name in dataset.attribute_names]
