#!/usr/bin/env python3
"""Sweep the slice length and report how retrieval quality changes.

Runs leave-one-graph-out cross-validation once per slice length and
writes a wide CSV (one row per length, mean/std columns per metric).

    python3 scripts/run_slice_length_study.py --corpus demo_corpus --lengths 1,2,3,4,5
"""

import argparse
import sys
from pathlib import Path

from procomplete import (
    EvalConfig,
    HashEmbedder,
    MODES,
    MODE_WITH_GATEWAYS,
    load_corpus,
    slice_length_study,
    study_to_csv,
)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--corpus", default="demo_corpus", help="directory of .bpmn files")
    parser.add_argument("--lengths", default="1,2,3,4,5", help="comma-separated slice lengths")
    parser.add_argument("--k", type=int, default=3, help="recommendations per query")
    parser.add_argument("--mode", choices=sorted(MODES), default=MODE_WITH_GATEWAYS)
    parser.add_argument("--seed", type=int, default=0, help="random seed")
    parser.add_argument("--dimension", type=int, default=512, help="embedding dimension")
    parser.add_argument("--out", default="slice-length-study.csv", help="CSV to write")
    args = parser.parse_args(argv)

    corpus = load_corpus(args.corpus)
    lengths = [int(part) for part in args.lengths.split(",") if part.strip()]
    config = EvalConfig(
        k=args.k, mode=args.mode, seed=args.seed, dataset=Path(args.corpus).name
    )
    provider = HashEmbedder(dimension=args.dimension)

    print(f"{len(corpus)} processes; lengths {lengths}; mode {args.mode}")
    study = slice_length_study(corpus, config, provider, lengths=lengths)
    Path(args.out).write_bytes(study_to_csv(study, config))
    print(f"wrote {args.out}")

    for length, report in study:
        means = {
            row.metric: row.mean for row in report.rows if row.algorithm == "slicing"
        }
        summary = "  ".join(f"{metric}={mean:.3f}" for metric, mean in means.items())
        print(f"n={length}: {summary}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
