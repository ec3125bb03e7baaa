"""
Configuration utilities for integration runs.
"""

from .settings import (
    BlockingConfig,
    ClusteringConfig,
    FusionConfig,
    LearnerConfig,
    MatchingConfig,
    MetricsConfig,
    NormalizationConfig,
    OpenAISettings,
    OracleConfig,
    RunConfig,
    SchemaMatchingConfig,
    SourceConfig,
    UnitPriceConfig,
    default_threshold_grid,
    load_openai_settings,
    load_run_config,
    validate_paths,
)

__all__ = [
    "BlockingConfig",
    "ClusteringConfig",
    "FusionConfig",
    "LearnerConfig",
    "MatchingConfig",
    "MetricsConfig",
    "NormalizationConfig",
    "OpenAISettings",
    "OracleConfig",
    "RunConfig",
    "SchemaMatchingConfig",
    "SourceConfig",
    "UnitPriceConfig",
    "default_threshold_grid",
    "load_openai_settings",
    "load_run_config",
    "validate_paths",
]
