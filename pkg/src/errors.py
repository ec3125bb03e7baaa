"""
Exception hierarchy shared by every integration layer.

Library code raises these; only the CLI translates them into exit codes.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence


class IntegrationError(Exception):
    """Base class for all integration failures."""


class DatasetError(IntegrationError):
    """A source file or dataset violates a structural invariant."""

    def __init__(self, message: str, offending: Sequence[object] = ()) -> None:
        self.offending = [str(item) for item in offending]
        if self.offending:
            message = f"{message}: {', '.join(self.offending)}"
        super().__init__(message)


class ConfigurationError(IntegrationError):
    """Invalid run configuration or a resolver applied to an incompatible type."""


class MissingArtifactError(IntegrationError):
    """A stepwise invocation needs an artifact that an earlier step has not written."""

    def __init__(self, path: Path) -> None:
        self.path = path
        super().__init__(f"missing prerequisite artifact {path}")


class TrainingDataError(IntegrationError):
    """Labeled data is unusable for training or selection (e.g. a single class)."""


class ClusterIntegrityError(IntegrationError):
    """A cluster holds more than one record from the same source."""


class OracleError(IntegrationError):
    """Base class for oracle failures."""


class BudgetExhausted(OracleError):
    """The configured spending ceiling has been reached."""


class OracleTransportError(OracleError):
    """The transport failed after all retries."""


class OracleContractError(OracleError):
    """The reply violated the response contract even after a repair re-prompt."""

    def __init__(self, message: str, raw_reply: str) -> None:
        self.raw_reply = raw_reply
        super().__init__(message)
