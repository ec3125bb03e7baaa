"""
Write a synthetic benchmark directory ready for ``python -m src.pipeline``.
"""

from __future__ import annotations

import argparse
import logging
from pathlib import Path

from src.synthetic import generate_benchmark


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Generate a three-source games benchmark.")
    parser.add_argument("--out", type=Path, required=True, help="Directory to write into.")
    parser.add_argument(
        "--records", type=int, default=2000, help="Records per source (default: 2000)."
    )
    parser.add_argument("--seed", type=int, default=7, help="Random seed (default: 7).")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="[%(name)s] %(message)s")
    try:
        files = generate_benchmark(args.out, args.records, args.seed)
    except ValueError as exc:
        print(f"Cannot generate benchmark: {exc}")
        return 1
    for name, path in sorted(files.sources.items()):
        print(f"[source] {name}: {path}")
    print(f"Benchmark complete: {files.entities} entities, run with --config {files.config}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
