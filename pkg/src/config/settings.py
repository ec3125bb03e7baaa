"""
Centralized run settings.

Credentials and endpoints come from environment variables; everything else
lives in a JSON run configuration validated by pydantic with every default
embedded.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from src.errors import ConfigurationError


@dataclass(frozen=True)
class OpenAISettings:
    """Credentials and model names for an OpenAI-compatible endpoint."""

    api_key: str
    chat_model: str = "gpt-5.2"
    embed_model: str = "text-embedding-3-small"
    api_base: Optional[str] = None


def load_openai_settings(required: bool = True) -> Optional[OpenAISettings]:
    """
    Load OpenAI configuration. If required is False and the API key is missing,
    return None instead of raising.
    """

    api_key = os.environ.get("OPENAI_API_KEY")
    chat_model = os.environ.get("OPENAI_CHAT_MODEL", "gpt-5.2")
    embed_model = os.environ.get("OPENAI_EMBED_MODEL", "text-embedding-3-small")
    api_base = os.environ.get("OPENAI_API_BASE")

    if not api_key:
        if required:
            raise ConfigurationError("OPENAI_API_KEY environment variable is required")
        return None

    return OpenAISettings(
        api_key=api_key, chat_model=chat_model, embed_model=embed_model, api_base=api_base
    )


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SourceConfig(_Section):
    path: Path
    name: Optional[str] = None
    id_attribute: str = "synthesize"
    delimiter: str = ","
    snapshot_date: Optional[date] = None

    @property
    def dataset_name(self) -> str:
        return self.name or self.path.stem


class UnitPriceConfig(_Section):
    """Integer micro-currency prices per million units and per call."""

    input_per_million: int = 0
    output_per_million: int = 0
    per_call: int = 0


def _default_prices() -> Dict[str, UnitPriceConfig]:
    return {
        "schema_match": UnitPriceConfig(input_per_million=1_750_000, output_per_million=14_000_000),
        "taxonomy_map": UnitPriceConfig(input_per_million=1_750_000, output_per_million=14_000_000),
        "pair_label": UnitPriceConfig(input_per_million=1_750_000, output_per_million=14_000_000),
        "fusion_select_entities": UnitPriceConfig(
            input_per_million=1_750_000, output_per_million=14_000_000
        ),
        "fusion_groundtruth": UnitPriceConfig(
            input_per_million=1_750_000, output_per_million=14_000_000
        ),
        "fusion_groundtruth_rag": UnitPriceConfig(
            input_per_million=1_750_000, output_per_million=14_000_000, per_call=10_000
        ),
        "embed": UnitPriceConfig(input_per_million=20_000),
    }


class OracleConfig(_Section):
    mode: Literal["mock", "remote"] = "mock"
    chat_model: Optional[str] = None
    embed_model: Optional[str] = None
    endpoint: Optional[str] = None
    prices: Dict[str, UnitPriceConfig] = Field(default_factory=_default_prices)
    budget_micro: Optional[int] = None
    cache_path: Optional[Path] = None
    max_retries: int = Field(default=2, ge=0)
    backoff_seconds: float = Field(default=1.0, ge=0)
    max_concurrency: int = Field(default=4, ge=1)
    mock_tables: Optional[Path] = None
    name_attribute: str = "name"
    embedding_dimension: int = Field(default=256, ge=8)
    grounded: bool = False


class SchemaMatchingConfig(_Section):
    matcher: Literal["oracle", "label", "instance"] = "oracle"
    label_threshold: float = Field(default=0.8, ge=0, le=1)
    instance_threshold: float = Field(default=0.3, ge=0, le=1)
    inner_metric: Literal["jaro-winkler", "levenshtein-sim"] = "jaro-winkler"
    target_reference: Optional[Path] = None
    gold: Optional[Path] = None
    sample_rows: int = Field(default=5, ge=1)
    summary_values: int = Field(default=5, ge=1)


class NormalizationConfig(_Section):
    decimal_separator: Literal["auto", ".", ","] = "auto"
    list_delimiter: str = ","
    day_first: bool = False
    taxonomy_batch_size: int = Field(default=200, ge=1)


class BlockingConfig(_Section):
    k: int = Field(default=20, ge=1)
    embed_batch_size: int = Field(default=512, ge=1)
    template: Optional[List[str]] = None


class LearnerConfig(_Section):
    family: Literal["regularized-linear", "bagged-trees", "boosted-trees"]
    hyperparameters: Dict[str, float | int | str | None] = Field(default_factory=dict)
    seed: int = 0


def _default_committee() -> List[LearnerConfig]:
    return [
        LearnerConfig(family="regularized-linear", hyperparameters={}, seed=0),
        LearnerConfig(family="bagged-trees", hyperparameters={"max_depth": 8}, seed=1),
        LearnerConfig(family="bagged-trees", hyperparameters={"max_depth": None}, seed=2),
        LearnerConfig(family="boosted-trees", hyperparameters={"learning_rate": 0.1}, seed=3),
        LearnerConfig(family="boosted-trees", hyperparameters={"learning_rate": 0.05}, seed=4),
    ]


def default_threshold_grid() -> List[float]:
    return [round(0.05 * step, 2) for step in range(1, 20)]


class MatchingConfig(_Section):
    pairs: Optional[List[Tuple[str, str]]] = None
    seed_target: int = Field(default=100, ge=1)
    per_query_bottom: int = Field(default=2, ge=0)
    batch_size: int = Field(default=100, ge=1)
    target_size: int = Field(default=600, ge=1)
    label_budget: Optional[int] = 3000
    sampling: Literal["active", "random"] = "active"
    augment_fraction: float = Field(default=0.2, ge=0, le=1)
    validation_size: int = Field(default=200, ge=2)
    search_budget: int = Field(default=5, ge=1)
    threshold_grid: List[float] = Field(default_factory=default_threshold_grid)
    committee: List[LearnerConfig] = Field(default_factory=_default_committee)
    gold_test: Optional[Path] = None

    @field_validator("committee")
    @classmethod
    def _committee_is_diverse(cls, committee: List[LearnerConfig]) -> List[LearnerConfig]:
        if len(committee) < 3 or len({member.family for member in committee}) < 2:
            raise ValueError("committee needs at least 3 members spanning 2 families")
        return committee


class ClusteringConfig(_Section):
    matching: Literal["greedy", "exact"] = "greedy"


class FusionConfig(_Section):
    sample_size: int = Field(default=100, ge=1)
    rag: bool = False
    validation_path: Optional[Path] = None
    refinement_sweeps: int = Field(default=3, ge=0)
    test_truth: Optional[Path] = None


class MetricsConfig(_Section):
    density_weighting: Literal["unweighted", "row_weighted"] = "unweighted"
    include_runtimes: bool = False


class RunConfig(_Section):
    """One integration run: sources, target schema and per-step parameters."""

    sources: List[SourceConfig]
    target_schema: Path
    output_dir: Path = Path("out")
    seed: int = 0
    oracle: OracleConfig = Field(default_factory=OracleConfig)
    schema_matching: SchemaMatchingConfig = Field(default_factory=SchemaMatchingConfig)
    normalization: NormalizationConfig = Field(default_factory=NormalizationConfig)
    blocking: BlockingConfig = Field(default_factory=BlockingConfig)
    matching: MatchingConfig = Field(default_factory=MatchingConfig)
    clustering: ClusteringConfig = Field(default_factory=ClusteringConfig)
    fusion: FusionConfig = Field(default_factory=FusionConfig)
    metrics: MetricsConfig = Field(default_factory=MetricsConfig)

    @field_validator("sources")
    @classmethod
    def _unique_source_names(cls, sources: List[SourceConfig]) -> List[SourceConfig]:
        if not sources:
            raise ValueError("at least one source is required")
        names = [source.dataset_name for source in sources]
        if len(set(names)) != len(names):
            raise ValueError(f"source names must be unique: {names}")
        return sources

    @property
    def cache_path(self) -> Path:
        return self.oracle.cache_path or self.output_dir / "oracle_cache.jsonl"

    def source(self, name: str) -> SourceConfig:
        for source in self.sources:
            if source.dataset_name == name:
                return source
        raise LookupError(f"unknown source {name}")


def _resolve(base: Path, path: Optional[Path]) -> Optional[Path]:
    if path is None or path.is_absolute():
        return path
    return (base / path).resolve()


def _resolve_paths(config: RunConfig, base: Path) -> RunConfig:
    for source in config.sources:
        source.path = _resolve(base, source.path)
    config.target_schema = _resolve(base, config.target_schema)
    config.output_dir = _resolve(base, config.output_dir)
    config.oracle.cache_path = _resolve(base, config.oracle.cache_path)
    config.oracle.mock_tables = _resolve(base, config.oracle.mock_tables)
    schema = config.schema_matching
    schema.target_reference = _resolve(base, schema.target_reference)
    schema.gold = _resolve(base, schema.gold)
    config.matching.gold_test = _resolve(base, config.matching.gold_test)
    config.fusion.validation_path = _resolve(base, config.fusion.validation_path)
    config.fusion.test_truth = _resolve(base, config.fusion.test_truth)
    return config


def validate_paths(config: RunConfig) -> None:
    """Every referenced input path must exist."""

    required = [source.path for source in config.sources] + [config.target_schema]
    optional = [
        config.oracle.mock_tables,
        config.schema_matching.target_reference,
        config.schema_matching.gold,
        config.matching.gold_test,
        config.fusion.validation_path,
        config.fusion.test_truth,
    ]
    missing = [str(path) for path in required + optional if path is not None and not path.exists()]
    if missing:
        raise ConfigurationError(f"configured paths do not exist: {', '.join(missing)}")


def load_run_config(path: Path | str) -> RunConfig:
    """Read, validate and path-resolve a JSON run configuration."""

    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"run configuration not found: {path}")
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
        config = RunConfig.model_validate(document)
    except (json.JSONDecodeError, ValidationError) as exc:
        raise ConfigurationError(f"invalid run configuration {path}: {exc}") from exc
    config = _resolve_paths(config, path.parent.resolve())
    validate_paths(config)
    return config
