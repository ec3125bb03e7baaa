"""
Per-step wall-clock timers, split into configuration and execution time.
"""

from __future__ import annotations

import json
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Callable, Dict, Iterator, Literal

Phase = Literal["configuration", "execution"]
PHASES: tuple[Phase, ...] = ("configuration", "execution")


class StepTimer:
    """
    Accumulates seconds per (step, phase).

    Configuration covers artifact generation (schema mappings, labels,
    validation sets, strategies); execution covers the data processing.
    """

    def __init__(self, clock: Callable[[], float] = time.perf_counter) -> None:
        self._clock = clock
        self._seconds: Dict[str, Dict[str, float]] = {}

    @contextmanager
    def phase(self, step: str, phase: Phase) -> Iterator[None]:
        if phase not in PHASES:
            raise ValueError(f"unknown phase {phase!r}")
        started = self._clock()
        try:
            yield
        finally:
            self.add(step, phase, self._clock() - started)

    def add(self, step: str, phase: Phase, seconds: float) -> None:
        times = self._seconds.setdefault(step, {name: 0.0 for name in PHASES})
        times[phase] += seconds

    def as_dict(self) -> Dict[str, Dict[str, float]]:
        return {step: dict(times) for step, times in self._seconds.items()}

    def totals(self) -> Dict[str, float]:
        return {
            name: sum(times[name] for times in self._seconds.values()) for name in PHASES
        }

    def save(self, path: Path | str) -> Path:
        """Merge into an existing timings file so stepwise runs accumulate."""

        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        document: Dict[str, Dict[str, float]] = {}
        if path.is_file():
            document = json.loads(path.read_text(encoding="utf-8")).get("steps", {})
        document.update(self.as_dict())
        totals = {
            name: sum(times.get(name, 0.0) for times in document.values()) for name in PHASES
        }
        path.write_text(
            json.dumps({"steps": document, "totals": totals}, indent=2) + "\n", encoding="utf-8"
        )
        return path

    @staticmethod
    def load(path: Path | str) -> Dict[str, Dict[str, float]]:
        path = Path(path)
        if not path.is_file():
            return {}
        return json.loads(path.read_text(encoding="utf-8")).get("steps", {})
