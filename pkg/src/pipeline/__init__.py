"""
Integration pipeline: stepwise orchestration, artifact layout and timers.
"""

from .artifacts import ArtifactLayout, pair_stem, require
from .runner import STEPS, IntegrationPipeline, StepResult, artifact_lines, run_pipeline
from .timing import PHASES, StepTimer

__all__ = [
    "ArtifactLayout",
    "IntegrationPipeline",
    "PHASES",
    "STEPS",
    "StepResult",
    "StepTimer",
    "artifact_lines",
    "pair_stem",
    "require",
    "run_pipeline",
]
