"""Command-line entry point.

Subcommands: build-index, recommend, evaluate, study, serve, loadtest.
Exit codes: 0 success, 1 domain error (bad input data, unreachable
targets, ...), 2 usage error (unknown flags, missing arguments).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
import uuid
from pathlib import Path

from .embedding import EmbeddingError, provider_from_spec
from .evaluation import (
    EvalConfig,
    EvaluationError,
    evaluate_corpus,
    emit_report,
    slice_length_study,
    study_to_csv,
)
from .loadtest import LoadTestError, load_test
from .model import ModelError, load_corpus, parse_bpmn
from .recommender import (
    MODE_TASKS_ONLY,
    MODE_WITH_GATEWAYS,
    RecommenderError,
    RecommendationQuery,
    build_index,
    load_index,
    recommend,
    save_index,
)

DOMAIN_ERRORS = (
    ModelError,
    EmbeddingError,
    RecommenderError,
    EvaluationError,
    LoadTestError,
    OSError,
    ValueError,
)


def _add_provider_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--provider",
        default="hash-v1",
        help="embedding provider: 'hash-v1' or 'remote:<url>'",
    )
    p.add_argument("--dimension", type=int, default=512, help="embedding dimension")


def _add_eval_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--corpus", required=True, help="directory of .bpmn/.xml files")
    p.add_argument("--k", "--top-k", dest="k", type=int, default=3, help="recommendations per query")
    p.add_argument("--filtered", action="store_true", help="skip gateway/end-event candidates")
    p.add_argument(
        "--mode",
        choices=[MODE_WITH_GATEWAYS, MODE_TASKS_ONLY],
        default=MODE_WITH_GATEWAYS,
        help="prediction mode",
    )
    p.add_argument("--seed", type=int, default=0, help="random seed")
    p.add_argument("--runs", type=int, default=30, help="random-baseline repetitions")
    p.add_argument("--dataset", default=None, help="dataset name in reports (default: corpus dir name)")
    p.add_argument(
        "--format",
        choices=["csv", "markdown", "both"],
        default="both",
        help="report format(s) to write",
    )
    _add_provider_flags(p)


def _cmd_build_index(args: argparse.Namespace) -> int:
    corpus = load_corpus(args.corpus)
    provider = provider_from_spec(args.provider, args.dimension)
    index = build_index(corpus, args.slice_length, provider, mode=args.mode)
    save_index(index, args.out)
    if args.json:
        print(
            json.dumps(
                {
                    "records": len(index),
                    "processes": len(corpus),
                    "slice_length": index.meta.slice_length,
                    "mode": index.meta.mode,
                    "embedder": {
                        "id": index.meta.embedder.id,
                        "dimension": index.meta.embedder.dimension,
                    },
                    "path": str(args.out),
                }
            )
        )
    else:
        print(
            f"indexed {len(index)} slices of length {index.meta.slice_length} "
            f"from {len(corpus)} process(es) -> {args.out}"
        )
    return 0


def _cmd_recommend(args: argparse.Namespace) -> int:
    index = load_index(args.index)
    provider = provider_from_spec(index.meta.embedder.id, index.meta.embedder.dimension)
    graphs = parse_bpmn(Path(args.bpmn).read_bytes())
    graph = next((g for g in graphs if args.task in g), None)
    if graph is None:
        print(f"error: task {args.task!r} not found in {args.bpmn}", file=sys.stderr)
        return 1
    query = RecommendationQuery(
        graph=graph,
        target_node=args.task,
        k=args.k,
        filtered=args.filtered,
        mode=index.meta.mode,
    )
    started = time.perf_counter()
    recs = recommend(query, index, provider)
    latency_ms = (time.perf_counter() - started) * 1000.0
    if args.json:
        print(
            json.dumps(
                {
                    "recommendations": [
                        {
                            "label": r.label,
                            "type": r.type.to_json(),
                            "score": r.score,
                            "explanation": {
                                "matched_slice_text": r.explanation.matched_slice_text,
                                "source_process_id": r.explanation.source_process_id,
                                "similarity": r.explanation.similarity,
                            },
                        }
                        for r in recs
                    ],
                    "request_id": str(uuid.uuid4()),
                    "latency_ms": round(latency_ms, 3),
                },
                indent=2,
            )
        )
        return 0
    if not recs:
        print("no recommendations")
        return 0
    for rank, r in enumerate(recs, start=1):
        print(f"{rank}. [{r.score:.4f}] {r.text}")
        print(
            f"   matched \"{r.explanation.matched_slice_text}\" "
            f"(process {r.explanation.source_process_id}, "
            f"similarity {r.explanation.similarity:.4f})"
        )
    return 0


def _load_eval_inputs(args: argparse.Namespace):
    corpus = load_corpus(args.corpus)
    provider = provider_from_spec(args.provider, args.dimension)
    dataset = args.dataset or Path(args.corpus).name
    return corpus, provider, dataset


def _cmd_evaluate(args: argparse.Namespace) -> int:
    corpus, provider, dataset = _load_eval_inputs(args)
    config = EvalConfig(
        slice_length=args.slice_length,
        k=args.k,
        filtered=args.filtered,
        mode=args.mode,
        runs_for_random=args.runs,
        seed=args.seed,
        dataset=dataset,
    )
    report = evaluate_corpus(corpus, config, provider)
    out = Path(args.out)
    written = []
    if args.format in ("csv", "both"):
        path = out.with_suffix(".csv")
        path.write_bytes(emit_report(report, "csv"))
        written.append(str(path))
    if args.format in ("markdown", "both"):
        path = out.with_suffix(".md")
        path.write_bytes(emit_report(report, "markdown"))
        written.append(str(path))
    if args.json:
        print(json.dumps([r.__dict__ for r in report.rows], indent=2))
    else:
        for r in report.rows:
            print(
                f"{r.dataset} {r.algorithm:>7} {r.configuration} {r.metric:>12}: "
                f"{r.mean:.4f} ± {r.std:.4f} (n={r.samples})"
            )
        print("wrote " + ", ".join(written))
    return 0


def _cmd_study(args: argparse.Namespace) -> int:
    corpus, provider, dataset = _load_eval_inputs(args)
    config = EvalConfig(
        slice_length=3,
        k=args.k,
        filtered=args.filtered,
        mode=args.mode,
        runs_for_random=args.runs,
        seed=args.seed,
        dataset=dataset,
    )
    lengths = [int(part) for part in args.lengths.split(",") if part.strip()]
    study = slice_length_study(corpus, config, provider, lengths)
    path = Path(args.out).with_suffix(".csv")
    path.write_bytes(study_to_csv(study, config))
    if args.json:
        print(
            json.dumps(
                {
                    str(n): [r.__dict__ for r in report.rows]
                    for n, report in study
                },
                indent=2,
            )
        )
    else:
        for n, report in study:
            cells = ", ".join(
                f"{r.metric}={r.mean:.3f}" for r in report.rows
            )
            print(f"n={n}: {cells}")
        print(f"wrote {path}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    from .service import serve

    if not args.index:
        print("error: no index given (use --index or INDEX_PATH)", file=sys.stderr)
        return 1
    serve(
        index_paths=args.index,
        bind=args.bind,
        provider_url=args.provider_url,
        k_default=args.k_default,
        request_log=args.request_log,
    )
    return 0


def _cmd_loadtest(args: argparse.Namespace) -> int:
    result = load_test(
        target_url=args.url,
        users=args.users,
        total_requests=args.requests,
        think_time=None if args.no_think else (1.0, 5.0),
        seed=args.seed,
        k=args.k,
        timeout=args.timeout,
    )
    if args.json:
        print(
            json.dumps(
                {
                    "users": result.users,
                    "requests": result.requests,
                    "duration_s": round(result.duration_s, 3),
                    "avg_rps": round(result.avg_rps, 3),
                    "response_ms": {
                        "avg": round(result.response.avg_ms, 3),
                        "min": round(result.response.min_ms, 3),
                        "max": round(result.response.max_ms, 3),
                        "p90": round(result.response.p90_ms, 3),
                    },
                    "failure_rate": result.failure_rate,
                }
            )
        )
        return 0
    print(f"users:        {result.users}")
    print(f"requests:     {result.requests}")
    print(f"duration:     {result.duration_s:.1f} s")
    print(f"throughput:   {result.avg_rps:.1f} req/s")
    print(
        "response ms:  "
        f"avg {result.response.avg_ms:.0f}, min {result.response.min_ms:.0f}, "
        f"max {result.response.max_ms:.0f}, p90 {result.response.p90_ms:.0f}"
    )
    print(f"failure rate: {result.failure_rate * 100:.2f}%")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="procomplete",
        description="Semantic autocompletion for business-process models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(
            name, help=help_text, formatter_class=argparse.ArgumentDefaultsHelpFormatter
        )
        p.add_argument("--json", action="store_true", help="machine-readable output")
        return p

    p = add("build-index", "slice and embed a corpus into an index file")
    p.add_argument("--corpus", required=True, help="directory of .bpmn/.xml files")
    p.add_argument("--out", required=True, help="index file to write")
    p.add_argument("--n", "--slice-length", dest="slice_length", type=int, default=3,
                   help="nodes per slice")
    p.add_argument("--mode", choices=[MODE_WITH_GATEWAYS, MODE_TASKS_ONLY],
                   default=MODE_WITH_GATEWAYS, help="prediction mode")
    _add_provider_flags(p)
    p.set_defaults(func=_cmd_build_index)

    p = add("recommend", "recommend next elements for a task of a workflow")
    p.add_argument("--index", default=os.environ.get("INDEX_PATH"), required="INDEX_PATH" not in os.environ,
                   help="index file (env INDEX_PATH)")
    p.add_argument("--bpmn", required=True, help="BPMN file with the partial workflow")
    p.add_argument("--task", required=True, help="node id to autocomplete after")
    p.add_argument("--k", "--top-k", dest="k", type=int, default=int(os.environ.get("K_DEFAULT", "3")),
                   help="recommendations to return")
    p.add_argument("--filtered", action="store_true", help="skip gateway/end-event candidates")
    p.set_defaults(func=_cmd_recommend)

    p = add("evaluate", "leave-one-process-out evaluation of a corpus")
    p.add_argument("--n", "--slice-length", dest="slice_length", type=int, default=3,
                   help="nodes per slice")
    _add_eval_flags(p)
    p.add_argument("--out", default="eval-report", help="output path prefix")
    p.set_defaults(func=_cmd_evaluate)

    p = add("study", "evaluation repeated across slice lengths")
    _add_eval_flags(p)
    p.add_argument("--lengths", default="1,2,3,4,5", help="comma-separated slice lengths")
    p.add_argument("--out", default="slice-length-study", help="output path prefix")
    p.set_defaults(func=_cmd_study)

    p = add("serve", "serve recommendations over HTTP")
    env_index = os.environ.get("INDEX_PATH")
    p.add_argument("--index", action="append", default=[env_index] if env_index else [],
                   help="index file, repeatable for a second mode (env INDEX_PATH)")
    p.add_argument("--bind", default=os.environ.get("BIND_ADDR", "127.0.0.1:8080"),
                   help="host:port to listen on (env BIND_ADDR)")
    p.add_argument("--k-default", type=int, default=int(os.environ.get("K_DEFAULT", "3")),
                   help="k when the request omits it (env K_DEFAULT)")
    p.add_argument("--provider-url", default=os.environ.get("PROVIDER_URL"),
                   help="remote embedding endpoint (env PROVIDER_URL)")
    p.add_argument("--request-log", default=None, help="JSONL request log file (default: stderr)")
    p.set_defaults(func=_cmd_serve)

    p = add("loadtest", "drive a running service with simulated users")
    p.add_argument("--url", required=True, help="service base URL")
    p.add_argument("--users", type=int, default=10, help="concurrent simulated users")
    p.add_argument("--requests", type=int, default=100, help="total requests to send")
    p.add_argument("--seed", type=int, default=0, help="random seed")
    p.add_argument("--k", type=int, default=3, help="recommendations per request")
    p.add_argument("--no-think", action="store_true",
                   help="drop the 1-5 s think time between a user's requests")
    p.add_argument("--timeout", type=float, default=30.0, help="per-request timeout (s)")
    p.set_defaults(func=_cmd_loadtest)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DOMAIN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
