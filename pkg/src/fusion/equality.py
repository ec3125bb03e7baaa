"""
Value equality used to score fused values against ground truth.
"""

from __future__ import annotations

import unicodedata
from typing import Optional

from src.datamodel import Value, ValueType
from src.datamodel.profiling import value_text
from src.normalization import UNPARSED, parse_date, parse_duration, parse_number, split_list

NUMERIC_TOLERANCE = 0.01
LIST_JACCARD = 0.8


def canonical_text(value: Value) -> str:
    """Casefolded text without punctuation or whitespace."""

    text = unicodedata.normalize("NFKC", value_text(value)).casefold()
    return "".join(
        char
        for char in text
        if not char.isspace() and not unicodedata.category(char).startswith("P")
    )


def _numbers_equal(left: Value, right: Value, parse=parse_number) -> Optional[bool]:
    a, b = parse(left), parse(right)
    if a is UNPARSED or b is UNPARSED:
        return None
    scale = max(abs(a), abs(b))
    if scale == 0:
        return True
    return abs(a - b) <= NUMERIC_TOLERANCE * scale


def _dates_equal(left: Value, right: Value) -> Optional[bool]:
    a, b = parse_date(left), parse_date(right)
    if a is UNPARSED or b is UNPARSED:
        return None
    return a == b


def _lists_equal(left: Value, right: Value) -> Optional[bool]:
    a, b = split_list(left), split_list(right)
    if a is UNPARSED or b is UNPARSED:
        return None
    left_items = {canonical_text(item) for item in a} - {""}
    right_items = {canonical_text(item) for item in b} - {""}
    if not left_items and not right_items:
        return True
    return len(left_items & right_items) / len(left_items | right_items) >= LIST_JACCARD


def values_equal(fused: Optional[Value], truth: Optional[Value], declared_type: ValueType) -> bool:
    """
    Type-aware equality of a fused value and a ground-truth value.

    Null is correct only against an explicitly null truth. Unparseable values fall
    back to the string rule.
    """

    if fused is None or truth is None:
        return fused is None and truth is None
    comparison: Optional[bool] = None
    if declared_type is ValueType.DURATION:
        comparison = _numbers_equal(fused, truth, parse_duration)
    elif declared_type.is_numeric:
        comparison = _numbers_equal(fused, truth)
    elif declared_type is ValueType.DATE:
        comparison = _dates_equal(fused, truth)
    elif declared_type is ValueType.LIST:
        comparison = _lists_equal(fused, truth)
    if comparison is not None:
        return comparison
    return canonical_text(fused) == canonical_text(truth)
