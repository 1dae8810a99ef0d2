"""Corpus evaluation: leave-one-process-out cross-validation.

Each fold holds out one process, indexes the rest, replays the held-out
process as a growing prefix (one query state per element in depth-first
construction order) and scores the recommendations against the true
successors.  A frequency-weighted random recommender provides the
baseline.  Aggregates are means with population standard deviations,
accumulated with compensated summation so result order cannot perturb
the reported values.
"""

from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .embedding import Provider
from .metrics import GroundTruth, MetricSample, score_sample
from .model import ElementType, ProcessGraph, contract_gateways
from .recommender import (
    MODE_TASKS_ONLY,
    MODE_WITH_GATEWAYS,
    MODES,
    EmptyIndexError,
    NoSliceEndsAtTargetError,
    RecommendationQuery,
    build_index,
    recommend,
)


class EvaluationError(Exception):
    """Base class for evaluation errors."""


class InsufficientCorpusError(EvaluationError):
    """Cross-validation needs at least two processes."""


class EmptyPoolError(EvaluationError):
    """The random baseline has no candidate elements to sample from."""


ALGORITHM_SLICING = "slicing"
ALGORITHM_RANDOM = "random"
CONFIG_ALL = "all-elements"
CONFIG_FILTERED = "filtered"
METRIC_ORDER = ("precision", "recall", "bleu", "meteor", "cosine")


@dataclass(frozen=True)
class EvalConfig:
    slice_length: int = 3
    k: int = 3
    filtered: bool = False
    mode: str = MODE_WITH_GATEWAYS
    runs_for_random: int = 30
    seed: int = 0
    dataset: str = "corpus"

    @property
    def configuration(self) -> str:
        return CONFIG_FILTERED if self.filtered else CONFIG_ALL

    def metric_name(self, metric: str) -> str:
        if metric in ("precision", "recall"):
            return f"{metric}@{self.k}"
        return metric


@dataclass(frozen=True)
class QueryState:
    """A partially built process, the element to extend, and the truth."""

    prefix_graph: ProcessGraph
    target_node: str
    truth: GroundTruth


@dataclass(frozen=True)
class ReportRow:
    dataset: str
    algorithm: str
    configuration: str
    metric: str
    mean: float
    std: float
    samples: int


@dataclass
class EvalReport:
    rows: list[ReportRow]

    @property
    def empty(self) -> bool:
        return all(r.samples == 0 for r in self.rows)

    def row(self, algorithm: str, metric: str) -> ReportRow:
        for r in self.rows:
            if r.algorithm == algorithm and r.metric == metric:
                return r
        raise KeyError((algorithm, metric))


def _dfs_order(graph: ProcessGraph) -> list[str]:
    order: list[str] = []
    seen: set[str] = set()

    def visit(node_id: str) -> None:
        if node_id in seen:
            return
        seen.add(node_id)
        order.append(node_id)
        for f in graph.out_flows(node_id):
            visit(f.target)

    for start in graph.starts:
        visit(start)
    for node in graph.nodes:
        visit(node.id)
    return order


def generate_query_states(graph: ProcessGraph) -> list[QueryState]:
    """One state per prefix of the depth-first construction order.

    State t (t = 1 .. |V|-1) contains the first t elements and the flows
    among them; the target is the t-th element and the truth is its
    successor set in the full graph.  States with no successors at all
    are dropped.
    """
    order = _dfs_order(graph)
    states: list[QueryState] = []
    for t in range(1, len(order)):
        target = order[t - 1]
        truth_elements = tuple(
            (n.label, n.type) for n in graph.successors(target)
        )
        if not truth_elements:
            continue
        prefix_ids = set(order[:t])
        prefix = ProcessGraph(
            graph.process_id,
            tuple(n for n in graph.nodes if n.id in prefix_ids),
            tuple(
                f for f in graph.flows
                if f.source in prefix_ids and f.target in prefix_ids
            ),
        )
        states.append(QueryState(prefix, target, GroundTruth(truth_elements)))
    return states


def _keep_candidate(label: str | None, etype: ElementType, filtered: bool) -> bool:
    return not (filtered and (etype.is_gateway or etype.is_end_event))


def _filtered_truth(truth: GroundTruth, filtered: bool) -> GroundTruth | None:
    if not filtered:
        return truth
    kept = tuple(
        (label, etype)
        for label, etype in truth.elements
        if _keep_candidate(label, etype, filtered)
    )
    return GroundTruth(kept) if kept else None


class _CachingProvider:
    """Memoizes embeddings; metric scoring embeds the same texts repeatedly."""

    def __init__(self, provider: Provider):
        self._provider = provider
        self._cache: dict[str, np.ndarray] = {}

    @property
    def descriptor(self):
        return self._provider.descriptor

    def embed(self, text: str) -> np.ndarray:
        vec = self._cache.get(text)
        if vec is None:
            vec = self._provider.embed(text)
            self._cache[text] = vec
        return vec

    def embed_batch(self, texts: Sequence[str]) -> list[np.ndarray]:
        missing = [t for t in texts if t not in self._cache]
        if missing:
            for t, vec in zip(missing, self._provider.embed_batch(missing)):
                self._cache[t] = vec
        return [self._cache[t] for t in texts]


def _aggregate(config: EvalConfig, algorithm: str, samples: list[MetricSample]) -> list[ReportRow]:
    rows = []
    n = len(samples)
    for metric in METRIC_ORDER:
        values = [getattr(s, metric) for s in samples]
        if n:
            mean = math.fsum(values) / n
            std = math.sqrt(math.fsum((v - mean) ** 2 for v in values) / n)
        else:
            mean = std = float("nan")
        rows.append(
            ReportRow(
                dataset=config.dataset,
                algorithm=algorithm,
                configuration=config.configuration,
                metric=config.metric_name(metric),
                mean=mean,
                std=std,
                samples=n,
            )
        )
    return rows


def _fold_graphs(corpus: Sequence[ProcessGraph], config: EvalConfig):
    if len(corpus) < 2:
        raise InsufficientCorpusError(
            f"need at least 2 processes for cross-validation, got {len(corpus)}"
        )
    prepared = [
        contract_gateways(g) if config.mode == MODE_TASKS_ONLY else g for g in corpus
    ]
    for i, held in enumerate(prepared):
        training = prepared[:i] + prepared[i + 1 :]
        yield held, training


def _scorable_states(held: ProcessGraph, config: EvalConfig) -> list[QueryState]:
    states = []
    for state in generate_query_states(held):
        truth = _filtered_truth(state.truth, config.filtered)
        if truth is None:
            continue
        states.append(replace(state, truth=truth))
    return states


def leave_one_out_cv(
    corpus: Sequence[ProcessGraph],
    config: EvalConfig,
    provider: Provider,
) -> EvalReport:
    """Evaluate the slicing recommender with leave-one-process-out CV.

    States whose target has no slice of the configured length inside the
    prefix are skipped, as are folds whose training side yields no
    index.  In filtered mode, gateway/end-event recommendations are
    suppressed and states whose entire truth is filtered away are
    skipped.
    """
    if config.mode not in MODES:
        raise ValueError(f"unknown mode {config.mode!r}")
    cached = _CachingProvider(provider)
    samples: list[MetricSample] = []
    for held, training in _fold_graphs(corpus, config):
        try:
            index = build_index(training, config.slice_length, cached, mode=config.mode)
        except EmptyIndexError:
            continue
        for state in _scorable_states(held, config):
            query = RecommendationQuery(
                graph=state.prefix_graph,
                target_node=state.target_node,
                k=config.k,
                filtered=config.filtered,
                mode=config.mode,
            )
            try:
                recs = recommend(query, index, cached)
            except NoSliceEndsAtTargetError:
                continue
            samples.append(score_sample(recs, state.truth, config.k, cached))
    return EvalReport(_aggregate(config, ALGORITHM_SLICING, samples))


@dataclass(frozen=True)
class _PoolEntry:
    label: str | None
    type: ElementType
    weight: int


def element_pool(
    graphs: Sequence[ProcessGraph], filtered: bool = False
) -> list[_PoolEntry]:
    """Distinct (label, type) pairs with corpus frequencies as weights."""
    weights: dict[tuple[str | None, ElementType], int] = {}
    for g in graphs:
        for node in g.nodes:
            if not _keep_candidate(node.label, node.type, filtered):
                continue
            key = (node.label, node.type)
            weights[key] = weights.get(key, 0) + 1
    return [_PoolEntry(label, etype, w) for (label, etype), w in weights.items()]


@dataclass(frozen=True)
class _RandomPick:
    label: str | None
    type: ElementType


def _sample_distinct(
    pool: list[_PoolEntry], k: int, rng: random.Random
) -> list[_RandomPick]:
    remaining = list(pool)
    picks: list[_RandomPick] = []
    while remaining and len(picks) < k:
        total = sum(e.weight for e in remaining)
        roll = rng.random() * total
        cumulative = 0.0
        chosen = len(remaining) - 1
        for idx, entry in enumerate(remaining):
            cumulative += entry.weight
            if roll < cumulative:
                chosen = idx
                break
        entry = remaining.pop(chosen)
        picks.append(_RandomPick(entry.label, entry.type))
    return picks


def random_baseline(
    corpus: Sequence[ProcessGraph],
    config: EvalConfig,
    provider: Provider,
    rng: random.Random | None = None,
) -> EvalReport:
    """Frequency-weighted random recommendations over the same folds.

    The pool holds every element of the fold's training processes; each
    run draws k distinct (label, type) pairs per state, and metrics are
    aggregated over all runs.  The baseline ignores slices, so every
    state with nonempty (post-filter) truth is scored.
    """
    if config.mode not in MODES:
        raise ValueError(f"unknown mode {config.mode!r}")
    rng = rng if rng is not None else random.Random(config.seed)
    cached = _CachingProvider(provider)
    folds = []
    for held, training in _fold_graphs(corpus, config):
        pool = element_pool(training, config.filtered)
        if not pool:
            raise EmptyPoolError(
                f"no candidate elements for fold holding out {held.process_id!r}"
            )
        states = _scorable_states(held, config)
        folds.append((pool, states))
    samples: list[MetricSample] = []
    for _ in range(config.runs_for_random):
        for pool, states in folds:
            for state in states:
                picks = _sample_distinct(pool, config.k, rng)
                samples.append(score_sample(picks, state.truth, config.k, cached))
    return EvalReport(_aggregate(config, ALGORITHM_RANDOM, samples))


def evaluate_corpus(
    corpus: Sequence[ProcessGraph],
    config: EvalConfig,
    provider: Provider,
) -> EvalReport:
    """Slicing engine and random baseline on one corpus, one report."""
    slicing = leave_one_out_cv(corpus, config, provider)
    baseline = random_baseline(corpus, config, provider)
    return EvalReport(slicing.rows + baseline.rows)


def slice_length_study(
    corpus: Sequence[ProcessGraph],
    config: EvalConfig,
    provider: Provider,
    lengths: Sequence[int] = (1, 2, 3, 4, 5),
) -> list[tuple[int, EvalReport]]:
    """Slicing-engine evaluation repeated for each slice length."""
    return [
        (n, leave_one_out_cv(corpus, replace(config, slice_length=n), provider))
        for n in lengths
    ]


def _fmt(value: float) -> str:
    return repr(float(value))


def emit_report(report: EvalReport, fmt: str = "csv") -> bytes:
    """Render a report as CSV (full precision) or a markdown table."""
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            ["dataset", "algorithm", "configuration", "metric", "mean", "std", "samples"]
        )
        for r in report.rows:
            writer.writerow(
                [r.dataset, r.algorithm, r.configuration, r.metric,
                 _fmt(r.mean), _fmt(r.std), r.samples]
            )
        return buf.getvalue().encode("utf-8")
    if fmt == "markdown":
        return _markdown_report(report)
    raise ValueError(f"unknown report format {fmt!r}")


def _markdown_report(report: EvalReport) -> bytes:
    lines: list[str] = []
    groups: dict[tuple[str, str], dict[str, dict[str, ReportRow]]] = {}
    for r in report.rows:
        by_metric = groups.setdefault((r.dataset, r.configuration), {})
        by_metric.setdefault(r.metric, {})[r.algorithm] = r
    for (dataset, configuration), by_metric in groups.items():
        algorithms = sorted({a for m in by_metric.values() for a in m})
        lines.append(f"## {dataset} ({configuration})")
        lines.append("")
        lines.append("| metric | " + " | ".join(algorithms) + " |")
        lines.append("|---" * (len(algorithms) + 1) + "|")
        for metric, by_alg in by_metric.items():
            cells = []
            for alg in algorithms:
                row = by_alg.get(alg)
                if row is None or row.samples == 0:
                    cells.append("n/a")
                else:
                    cells.append(f"{row.mean:.2f}±{row.std:.2f}")
            lines.append(f"| {metric} | " + " | ".join(cells) + " |")
        samples = {r.samples for m in by_metric.values() for r in m.values()}
        lines.append("")
        lines.append(f"Samples per algorithm: {sorted(samples)}")
        lines.append("")
    return "\n".join(lines).encode("utf-8")


def study_to_csv(study: Sequence[tuple[int, EvalReport]], config: EvalConfig) -> bytes:
    """Wide per-length table: one row per slice length, metrics as columns."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    metric_names = [config.metric_name(m) for m in METRIC_ORDER]
    header = ["slice_length"]
    for name in metric_names:
        header += [f"{name}_mean", f"{name}_std"]
    header.append("samples")
    writer.writerow(header)
    for length, report in study:
        by_metric = {r.metric: r for r in report.rows if r.algorithm == ALGORITHM_SLICING}
        row: list[str] = [str(length)]
        samples = 0
        for name in metric_names:
            r = by_metric[name]
            row += [_fmt(r.mean), _fmt(r.std)]
            samples = r.samples
        row.append(str(samples))
        writer.writerow(row)
    return buf.getvalue().encode("utf-8")
