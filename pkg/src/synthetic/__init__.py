"""
Synthetic multi-source benchmark with ground truth for closed-loop runs.
"""

from .generator import (
    LAYOUTS,
    PLATFORM_ALIASES,
    PLATFORMS,
    BenchmarkFiles,
    GameEntity,
    SourceLayout,
    generate_benchmark,
    target_schema,
)

__all__ = [
    "BenchmarkFiles",
    "GameEntity",
    "LAYOUTS",
    "PLATFORMS",
    "PLATFORM_ALIASES",
    "SourceLayout",
    "generate_benchmark",
    "target_schema",
]
