"""
Embedded country reference table: names and common aliases to ISO 3166-1 alpha-2.
"""

from __future__ import annotations

import re
from typing import Dict, Optional

_COUNTRIES: Dict[str, tuple[str, ...]] = {
    "AR": ("Argentina",),
    "AT": ("Austria", "Österreich"),
    "AU": ("Australia",),
    "BE": ("Belgium", "Belgique", "België"),
    "BG": ("Bulgaria",),
    "BM": ("Bermuda",),
    "BR": ("Brazil", "Brasil"),
    "CA": ("Canada",),
    "CH": ("Switzerland", "Schweiz", "Suisse"),
    "CL": ("Chile",),
    "CN": ("China", "People's Republic of China", "PRC", "Mainland China"),
    "CO": ("Colombia",),
    "CY": ("Cyprus",),
    "CZ": ("Czech Republic", "Czechia"),
    "DE": ("Germany", "Deutschland", "West Germany", "Federal Republic of Germany"),
    "DK": ("Denmark",),
    "EG": ("Egypt",),
    "ES": ("Spain", "España"),
    "FI": ("Finland",),
    "FR": ("France",),
    "GB": (
        "United Kingdom",
        "UK",
        "U.K.",
        "Great Britain",
        "Britain",
        "England",
        "Scotland",
        "Wales",
        "Northern Ireland",
    ),
    "GR": ("Greece",),
    "HK": ("Hong Kong", "Hong Kong SAR"),
    "HU": ("Hungary",),
    "ID": ("Indonesia",),
    "IE": ("Ireland", "Republic of Ireland"),
    "IL": ("Israel",),
    "IN": ("India",),
    "IS": ("Iceland",),
    "IT": ("Italy", "Italia"),
    "JM": ("Jamaica",),
    "JP": ("Japan",),
    "KR": ("South Korea", "Korea, Republic of", "Republic of Korea", "Korea"),
    "KW": ("Kuwait",),
    "KZ": ("Kazakhstan",),
    "LU": ("Luxembourg",),
    "MA": ("Morocco",),
    "MX": ("Mexico", "México"),
    "MY": ("Malaysia",),
    "NG": ("Nigeria",),
    "NL": ("Netherlands", "The Netherlands", "Holland"),
    "NO": ("Norway",),
    "NZ": ("New Zealand",),
    "PE": ("Peru",),
    "PH": ("Philippines",),
    "PK": ("Pakistan",),
    "PL": ("Poland",),
    "PT": ("Portugal",),
    "QA": ("Qatar",),
    "RO": ("Romania",),
    "RS": ("Serbia",),
    "RU": ("Russia", "Russian Federation"),
    "SA": ("Saudi Arabia",),
    "SE": ("Sweden", "Sverige"),
    "SG": ("Singapore",),
    "TH": ("Thailand",),
    "TR": ("Turkey", "Türkiye"),
    "TW": ("Taiwan",),
    "UA": ("Ukraine",),
    "AE": ("United Arab Emirates", "UAE"),
    "US": (
        "United States",
        "United States of America",
        "USA",
        "U.S.",
        "U.S.A.",
        "US",
        "America",
    ),
    "VE": ("Venezuela",),
    "VN": ("Vietnam", "Viet Nam"),
    "ZA": ("South Africa",),
}

_ALPHA3 = {
    "ARG": "AR", "AUS": "AU", "AUT": "AT", "BEL": "BE", "BRA": "BR", "CAN": "CA",
    "CHE": "CH", "CHN": "CN", "DEU": "DE", "DNK": "DK", "ESP": "ES", "FIN": "FI",
    "FRA": "FR", "GBR": "GB", "IND": "IN", "IRL": "IE", "ITA": "IT", "JPN": "JP",
    "KOR": "KR", "MEX": "MX", "NLD": "NL", "NOR": "NO", "NZL": "NZ", "POL": "PL",
    "PRT": "PT", "RUS": "RU", "SWE": "SE", "USA": "US", "ZAF": "ZA",
}  # fmt: skip

_PUNCTUATION = re.compile(r"[^\w\s]")


def _key(text: str) -> str:
    return " ".join(_PUNCTUATION.sub("", text.casefold()).split())


def _build_lookup() -> Dict[str, str]:
    lookup: Dict[str, str] = {}
    for code, names in _COUNTRIES.items():
        lookup[code.casefold()] = code
        for name in names:
            lookup[_key(name)] = code
    for alpha3, code in _ALPHA3.items():
        lookup[alpha3.casefold()] = code
    return lookup


_LOOKUP = _build_lookup()


def lookup_country(text: str) -> Optional[str]:
    """Return the alpha-2 code for a country name, alias or code, or None."""

    stripped = text.strip()
    if not stripped:
        return None
    return _LOOKUP.get(_key(stripped)) or _LOOKUP.get(stripped.casefold())
