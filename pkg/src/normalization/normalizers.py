"""
Deterministic code-based value normalizers.

Every normalizer accepts its own output and returns it unchanged, so applying
one twice is the same as applying it once. Failures return ``UNPARSED``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from datetime import date, datetime
from decimal import Decimal, InvalidOperation
from enum import Enum
from typing import Callable, Dict, List, Optional, Union

import pandas as pd

from src.datamodel import Value, lookup_country, strip_currency
from src.datamodel.profiling import looks_like_date


class NormalizerKind(str, Enum):
    NUMERIC_SCALE = "numeric_scale"
    DATE = "date"
    DURATION = "duration"
    COUNTRY = "country"
    PHONE = "phone_like_passthrough"
    LIST_SPLIT = "list_split"
    NONE = "none"


class _Unparsed:
    _instance: Optional["_Unparsed"] = None

    def __new__(cls) -> "_Unparsed":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNPARSED"

    def __bool__(self) -> bool:
        return False


UNPARSED = _Unparsed()
Normalized = Union[Value, _Unparsed]


@dataclass(frozen=True, slots=True)
class NormalizationHints:
    decimal_separator: str = "auto"
    list_delimiter: str = ","
    day_first: bool = False


DEFAULT_HINTS = NormalizationHints()

SCALE_FACTORS: Dict[str, Decimal] = {
    "k": Decimal(10) ** 3,
    "thousand": Decimal(10) ** 3,
    "m": Decimal(10) ** 6,
    "mm": Decimal(10) ** 6,
    "mio": Decimal(10) ** 6,
    "million": Decimal(10) ** 6,
    "b": Decimal(10) ** 9,
    "bn": Decimal(10) ** 9,
    "billion": Decimal(10) ** 9,
}

_NUMBER_WITH_SCALE = re.compile(r"^([-+]?)\s*(\d[\d.,' ]*?)\s*([a-z]+)?\.?$", re.IGNORECASE)
_THOUSANDS_GROUPS = re.compile(r"^\d{1,3}(?:,\d{3})+$")
_YEAR = re.compile(r"^\d{4}$")
_CLOCK = re.compile(r"^(\d+):(\d{1,2})(?::(\d{1,2}))?$")
_ISO_DURATION = re.compile(
    r"^P?T(?:(\d+(?:\.\d+)?)H)?(?:(\d+(?:\.\d+)?)M)?(?:(\d+(?:\.\d+)?)S)?$", re.IGNORECASE
)
_HOURS_MINUTES = re.compile(
    r"^(\d+(?:\.\d+)?)\s*h(?:ours?|rs?)?(?:\s*(\d+)\s*m(?:in(?:utes?|s)?)?)?$", re.IGNORECASE
)
_UNIT_AMOUNT = re.compile(
    r"^(\d+(?:\.\d+)?)\s*(min|mins|minutes|m|sec|secs|seconds|s)$", re.IGNORECASE
)
_PHONE_CHARACTERS = re.compile(r"[^\d+]")


def _plain_digits(digits: str, decimal_separator: str) -> str:
    digits = digits.replace(" ", "").replace("'", "")
    if decimal_separator == ",":
        return digits.replace(".", "").replace(",", ".")
    if decimal_separator == ".":
        return digits.replace(",", "")
    if "," in digits and "." in digits:
        if digits.rfind(",") > digits.rfind("."):
            return digits.replace(".", "").replace(",", ".")
        return digits.replace(",", "")
    if "," in digits:
        if digits.count(",") > 1 or _THOUSANDS_GROUPS.match(digits):
            return digits.replace(",", "")
        return digits.replace(",", ".")
    if digits.count(".") > 1:
        return digits.replace(".", "")
    return digits


def parse_number(value: Value, hints: NormalizationHints = DEFAULT_HINTS) -> Normalized:
    """Locale separators and scale words ("3.2 million", "12 MEUR") to a plain number."""

    if isinstance(value, bool):
        return UNPARSED
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        return UNPARSED
    match = _NUMBER_WITH_SCALE.match(strip_currency(value))
    if not match:
        return UNPARSED
    sign, digits, word = match.groups()
    factor = Decimal(1)
    if word:
        factor = SCALE_FACTORS.get(word.lower())
        if factor is None:
            return UNPARSED
    try:
        number = Decimal(_plain_digits(digits.strip(), hints.decimal_separator)) * factor
    except InvalidOperation:
        return UNPARSED
    return float(-number if sign == "-" else number)


def parse_date(value: Value, hints: NormalizationHints = DEFAULT_HINTS) -> Normalized:
    """Date-like text to a calendar date."""

    if isinstance(value, datetime):
        return value.date()
    if isinstance(value, date):
        return value
    if not isinstance(value, str):
        return UNPARSED
    text = value.strip()
    if not (looks_like_date(text) or _YEAR.match(text)):
        return UNPARSED
    if re.match(r"^\d{4}-\d{1,2}$", text):
        text = f"{text}-01"
    try:
        parsed = pd.to_datetime(text, dayfirst=hints.day_first and not text[:4].isdigit())
    except (ValueError, OverflowError, TypeError, pd.errors.OutOfBoundsDatetime):
        return UNPARSED
    if pd.isna(parsed):
        return UNPARSED
    return parsed.date()


def parse_duration(value: Value, hints: NormalizationHints = DEFAULT_HINTS) -> Normalized:
    """Durations to minutes. A bare number is taken as minutes as-is."""

    if isinstance(value, bool):
        return UNPARSED
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        return UNPARSED
    text = value.strip()
    try:
        return float(text)
    except ValueError:
        pass
    clock = _CLOCK.match(text)
    if clock:
        first, second, third = clock.groups()
        if third is None:
            return int(first) + int(second) / 60
        return int(first) * 60 + int(second) + int(third) / 60
    iso = _ISO_DURATION.match(text)
    if iso and any(iso.groups()):
        hours, minutes, seconds = (float(part) if part else 0.0 for part in iso.groups())
        return hours * 60 + minutes + seconds / 60
    hours_minutes = _HOURS_MINUTES.match(text)
    if hours_minutes:
        hours, minutes = hours_minutes.groups()
        return float(hours) * 60 + (int(minutes) if minutes else 0)
    amount = _UNIT_AMOUNT.match(text)
    if amount:
        number, unit = amount.groups()
        if unit.lower().startswith("s"):
            return float(number) / 60
        return float(number)
    return UNPARSED


def parse_country(value: Value, hints: NormalizationHints = DEFAULT_HINTS) -> Normalized:
    if not isinstance(value, str):
        return UNPARSED
    code = lookup_country(value)
    return code if code is not None else UNPARSED


def parse_phone(value: Value, hints: NormalizationHints = DEFAULT_HINTS) -> Normalized:
    """Keep digits and a leading plus; fewer than six digits is not a phone number."""

    if not isinstance(value, str):
        return UNPARSED
    text = value.strip()
    compact = _PHONE_CHARACTERS.sub("", text)
    leading_plus = compact.startswith("+")
    digits = compact.replace("+", "")
    if len(digits) < 6:
        return UNPARSED
    return ("+" if leading_plus else "") + digits


def split_list(value: Value, hints: NormalizationHints = DEFAULT_HINTS) -> Normalized:
    if isinstance(value, list):
        return [item.strip() for item in value if item and item.strip()]
    if not isinstance(value, str):
        return UNPARSED
    text = value.strip()
    if text.startswith("[") and text.endswith("]"):
        try:
            items = json.loads(text)
        except json.JSONDecodeError:
            items = None
        if isinstance(items, list):
            return [str(item).strip() for item in items if item is not None and str(item).strip()]
    delimiter = next(
        (candidate for candidate in (hints.list_delimiter, ";", "|") if candidate in text), None
    )
    parts: List[str] = text.split(delimiter) if delimiter else [text]
    return [part.strip() for part in parts if part.strip()]


NORMALIZERS: Dict[NormalizerKind, Callable[[Value, NormalizationHints], Normalized]] = {
    NormalizerKind.NUMERIC_SCALE: parse_number,
    NormalizerKind.DATE: parse_date,
    NormalizerKind.DURATION: parse_duration,
    NormalizerKind.COUNTRY: parse_country,
    NormalizerKind.PHONE: parse_phone,
    NormalizerKind.LIST_SPLIT: split_list,
}


def normalize_value(
    raw: Value, normalizer: NormalizerKind, hints: NormalizationHints = DEFAULT_HINTS
) -> Normalized:
    """Apply one normalizer; ``none`` returns the value untouched."""

    if normalizer is NormalizerKind.NONE:
        return raw
    return NORMALIZERS[normalizer](raw, hints)
