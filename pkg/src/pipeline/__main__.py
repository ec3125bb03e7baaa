"""
Command line entry point for the integration pipeline.
"""

from __future__ import annotations

import argparse
import logging
from pathlib import Path

from pydantic import ValidationError

from src.config import RunConfig, load_run_config
from src.errors import BudgetExhausted, IntegrationError, MissingArtifactError
from src.pipeline import STEPS, IntegrationPipeline, artifact_lines

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_MISSING_ARTIFACT = 2
EXIT_BUDGET = 3

logger = logging.getLogger("pipeline")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Integrate heterogeneous tables into one target schema."
    )
    parser.add_argument("--config", type=Path, required=True, help="JSON run configuration.")
    parser.add_argument(
        "--step",
        choices=[*STEPS, "all"],
        default="all",
        help="Pipeline step to run; 'all' chains every step.",
    )
    parser.add_argument(
        "--oracle",
        choices=["mock", "remote"],
        help="Override the configured oracle mode.",
    )
    parser.add_argument("--seed", type=int, help="Override the configured random seed.")
    parser.add_argument("--out", type=Path, help="Override the configured output directory.")
    parser.add_argument("--verbose", action="store_true", help="Log debug messages.")
    return parser


def apply_overrides(config: RunConfig, args: argparse.Namespace) -> RunConfig:
    if args.oracle is not None:
        config.oracle.mode = args.oracle
    if args.seed is not None:
        config.seed = args.seed
    if args.out is not None:
        config.output_dir = args.out.resolve()
    return config


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="[%(name)s] %(message)s",
    )

    try:
        config = apply_overrides(load_run_config(args.config), args)
        results = IntegrationPipeline(config).run(args.step)
    except MissingArtifactError as exc:
        logger.error("%s; run the earlier steps first", exc)
        print(f"Missing artifact: {exc.path}")
        return EXIT_MISSING_ARTIFACT
    except BudgetExhausted as exc:
        logger.error("%s", exc)
        return EXIT_BUDGET
    except (IntegrationError, ValidationError, FileNotFoundError) as exc:
        logger.error("%s", exc)
        return EXIT_INVALID

    for line in artifact_lines(results):
        print(line)
    print(f"Integration complete: {len(results)} step(s) written to {config.output_dir}")
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
