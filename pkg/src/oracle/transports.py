"""
Transport abstraction behind the oracle gateway.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

from .models import OracleRequest


@dataclass(frozen=True, slots=True)
class TransportReply:
    text: str
    input_units: int
    output_units: int


class OracleTransport(ABC):
    """Delivers one request and returns the raw reply text with usage."""

    name: str = "transport"
    grounded: bool = False

    @abstractmethod
    def complete(self, request: OracleRequest) -> TransportReply:
        """Send a request; raise on transport failure."""


def estimate_units(text: str) -> int:
    """Rough token count used where the provider reports none."""

    return math.ceil(len(text) / 4)
