"""Closed-loop load generator for the recommendation service.

Simulates N concurrent users that each send a recommendation request,
think for a uniformly random 1-5 s (suppressible for CI), and repeat
until the shared request budget is spent.  Each request draws one of
four workload types at random: a 5-node and a 25-node workflow, each
queried in with-gateways and in tasks-only prediction mode.
"""

from __future__ import annotations

import asyncio
import itertools
import math
import random
import time
from dataclasses import dataclass

import httpx

from .model import (
    EXCLUSIVE_GATEWAY,
    END_EVENT,
    START_EVENT,
    TASK,
    Flow,
    Node,
    ProcessGraph,
    to_bpmn_xml,
)
from .recommender import MODE_TASKS_ONLY, MODE_WITH_GATEWAYS


class LoadTestError(Exception):
    pass


class TargetUnreachableError(LoadTestError):
    """The service did not answer the pre-flight health check."""


_TASK_WORDS = [
    "Register request",
    "Check inventory",
    "Validate order data",
    "Approve budget",
    "Schedule delivery",
    "Notify customer",
    "Prepare invoice",
    "Review contract terms",
    "Collect feedback",
    "Archive case file",
    "Assess credit risk",
    "Update ledger",
    "Confirm shipment",
    "Plan resources",
    "Audit supplier",
    "Reconcile accounts",
    "Draft response letter",
    "Escalate to manager",
    "Verify identity",
    "Close ticket",
]


def _task(i: int, node_id: str) -> Node:
    label = _TASK_WORDS[i % len(_TASK_WORDS)]
    if i >= len(_TASK_WORDS):
        label = f"{label} {i // len(_TASK_WORDS) + 1}"
    return Node(node_id, TASK, label)


def linear_workflow(node_count: int = 5, process_id: str = "linear-workflow") -> ProcessGraph:
    """start -> task chain -> end, ``node_count`` nodes in total."""
    if node_count < 3:
        raise ValueError("need at least start, one task, end")
    nodes: list[Node] = [Node("start", START_EVENT)]
    for i in range(node_count - 2):
        nodes.append(_task(i, f"t{i + 1}"))
    nodes.append(Node("end", END_EVENT))
    flows = [
        Flow(f"f{i + 1}", nodes[i].id, nodes[i + 1].id) for i in range(len(nodes) - 1)
    ]
    return ProcessGraph(process_id, tuple(nodes), tuple(flows))


def branching_workflow(process_id: str = "branching-workflow") -> ProcessGraph:
    """A 25-node workflow with an exclusive split/join pair mid-way."""
    nodes: list[Node] = [Node("start", START_EVENT)]
    flows: list[Flow] = []
    word = itertools.count()

    def chain(prefix: str, count: int, after: str) -> str:
        prev = after
        for i in range(count):
            nid = f"{prefix}{i + 1}"
            nodes.append(_task(next(word), nid))
            flows.append(Flow(f"f-{prev}-{nid}", prev, nid))
            prev = nid
        return prev

    head_end = chain("a", 8, "start")
    nodes.append(Node("split", EXCLUSIVE_GATEWAY))
    flows.append(Flow("f-head-split", head_end, "split"))
    left_end = chain("b", 3, "split")
    right_end = chain("c", 3, "split")
    nodes.append(Node("join", EXCLUSIVE_GATEWAY))
    flows.append(Flow("f-left-join", left_end, "join"))
    flows.append(Flow("f-right-join", right_end, "join"))
    tail_end = chain("d", 7, "join")
    nodes.append(Node("end", END_EVENT))
    flows.append(Flow("f-tail-end", tail_end, "end"))
    graph = ProcessGraph(process_id, tuple(nodes), tuple(flows))
    assert len(graph.nodes) == 25, len(graph.nodes)
    return graph


@dataclass(frozen=True)
class Workload:
    name: str
    bpmn_xml: str
    task_id: str
    mode: str


def workload_corpus() -> list[ProcessGraph]:
    """The processes the service indexes must cover for the workloads."""
    return [linear_workflow(), branching_workflow()]


def default_workloads() -> list[Workload]:
    linear_xml = to_bpmn_xml(linear_workflow()).decode("utf-8")
    branching_xml = to_bpmn_xml(branching_workflow()).decode("utf-8")
    return [
        Workload("5-node/with-gateways", linear_xml, "t3", MODE_WITH_GATEWAYS),
        Workload("5-node/tasks-only", linear_xml, "t3", MODE_TASKS_ONLY),
        Workload("25-node/with-gateways", branching_xml, "d5", MODE_WITH_GATEWAYS),
        Workload("25-node/tasks-only", branching_xml, "d5", MODE_TASKS_ONLY),
    ]


@dataclass(frozen=True)
class ResponseStats:
    avg_ms: float
    min_ms: float
    max_ms: float
    p90_ms: float


@dataclass(frozen=True)
class LoadTestResult:
    users: int
    requests: int
    duration_s: float
    avg_rps: float
    response: ResponseStats
    failure_rate: float


def percentile_nearest_rank(values: list[float], q: float) -> float:
    """Nearest-rank percentile over the full sample (q in (0, 1])."""
    if not values:
        raise ValueError("no values")
    ordered = sorted(values)
    rank = max(1, math.ceil(q * len(ordered)))
    return ordered[rank - 1]


async def _run(
    base_url: str,
    users: int,
    total_requests: int,
    workloads: list[Workload],
    think_time: tuple[float, float] | None,
    seed: int,
    k: int,
    timeout: float,
) -> tuple[list[float], int]:
    latencies: list[float] = []
    failures = 0
    issued = 0
    limits = httpx.Limits(max_connections=users + 5, max_keepalive_connections=users + 5)
    async with httpx.AsyncClient(timeout=timeout, limits=limits) as client:

        async def user_loop(user_index: int) -> None:
            nonlocal issued, failures
            rng = random.Random(f"{seed}:{user_index}")
            user_id = f"user-{user_index}"
            while True:
                if issued >= total_requests:
                    return
                issued += 1
                workload = workloads[rng.randrange(len(workloads))]
                body = {
                    "bpmn_xml": workload.bpmn_xml,
                    "task_id": workload.task_id,
                    "user_id": user_id,
                    "k": k,
                    "mode": workload.mode,
                }
                started = time.perf_counter()
                try:
                    response = await client.post(
                        f"{base_url}/v1/recommendations", json=body
                    )
                    ok = response.status_code == 200
                except httpx.HTTPError:
                    ok = False
                latencies.append((time.perf_counter() - started) * 1000.0)
                if not ok:
                    failures += 1
                if think_time is not None:
                    await asyncio.sleep(rng.uniform(*think_time))

        await asyncio.gather(*(user_loop(i) for i in range(users)))
    return latencies, failures


def load_test(
    target_url: str,
    users: int,
    total_requests: int,
    workloads: list[Workload] | None = None,
    think_time: tuple[float, float] | None = (1.0, 5.0),
    seed: int = 0,
    k: int = 3,
    timeout: float = 30.0,
) -> LoadTestResult:
    """Drive the service until ``total_requests`` requests have completed.

    ``think_time=None`` (the CLI's --no-think) removes the pause between
    a user's consecutive requests so CI runs finish quickly; latency
    percentiles are unaffected by the pause either way.
    """
    if users < 1 or total_requests < 1:
        raise ValueError("users and total_requests must be >= 1")
    base_url = target_url.rstrip("/")
    try:
        health = httpx.get(f"{base_url}/v1/health", timeout=10.0)
        health.raise_for_status()
    except httpx.HTTPError as exc:
        raise TargetUnreachableError(f"health check failed for {base_url}: {exc}") from exc

    workloads = workloads if workloads is not None else default_workloads()
    if not workloads:
        raise ValueError("no workloads")
    started = time.perf_counter()
    latencies, failures = asyncio.run(
        _run(base_url, users, total_requests, workloads, think_time, seed, k, timeout)
    )
    duration = time.perf_counter() - started
    stats = ResponseStats(
        avg_ms=sum(latencies) / len(latencies),
        min_ms=min(latencies),
        max_ms=max(latencies),
        p90_ms=percentile_nearest_rank(latencies, 0.90),
    )
    return LoadTestResult(
        users=users,
        requests=len(latencies),
        duration_s=duration,
        avg_rps=len(latencies) / duration if duration > 0 else float("inf"),
        response=stats,
        failure_rate=failures / len(latencies),
    )
