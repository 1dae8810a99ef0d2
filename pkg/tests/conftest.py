"""Shared fixtures: model builders, random graphs, a live HTTP server."""

from __future__ import annotations

import random
import re
import socket
import threading
import time
from pathlib import Path

import pytest

from procomplete import (
    END_EVENT,
    EXCLUSIVE_GATEWAY,
    INCLUSIVE_GATEWAY,
    INTERMEDIATE_EVENT,
    MODE_TASKS_ONLY,
    MODE_WITH_GATEWAYS,
    PARALLEL_GATEWAY,
    START_EVENT,
    TASK,
    Flow,
    HashEmbedder,
    Node,
    ProcessGraph,
    build_index,
)

DATA_DIR = Path(__file__).parent / "data"


# --------------------------------------------------------------------------
# graph builders


def make_graph(process_id: str, nodes, flows) -> ProcessGraph:
    return ProcessGraph(process_id, tuple(nodes), tuple(flows))


def admissions_nodes_flows():
    nodes = [
        Node("s", START_EVENT),
        Node("cd", TASK, "Check documents"),
        Node("ev", TASK, "Evaluate"),
        Node("g1", EXCLUSIVE_GATEWAY),
        Node("inv", TASK, "Invite to an aptitude test"),
        Node("keep", TASK, "Keep in the applicant pool"),
        Node("g2", EXCLUSIVE_GATEWAY),
        Node("rank", TASK, "Rank students according to GPA and the test results"),
        Node("e", END_EVENT),
    ]
    flows = [
        Flow("f1", "s", "cd"),
        Flow("f2", "cd", "ev"),
        Flow("f3", "ev", "g1"),
        Flow("f4", "g1", "inv"),
        Flow("f5", "g1", "keep"),
        Flow("f6", "inv", "g2"),
        Flow("f7", "keep", "g2"),
        Flow("f8", "g2", "rank"),
        Flow("f9", "rank", "e"),
    ]
    return nodes, flows


@pytest.fixture
def admissions_graph() -> ProcessGraph:
    """Application-screening fragment: two tasks, an exclusive split into
    two alternatives, a rejoin, a final task, and an end event."""
    nodes, flows = admissions_nodes_flows()
    return make_graph("admissions", nodes, flows)


@pytest.fixture
def admissions_xml() -> bytes:
    return (DATA_DIR / "admissions_excerpt.bpmn").read_bytes()


def chain_graph(process_id: str, labels: list[str]) -> ProcessGraph:
    """Start -> Task(labels[0]) -> ... -> Task(labels[-1]) -> End."""
    nodes = [Node("start", START_EVENT)]
    nodes += [Node(f"t{i}", TASK, lbl) for i, lbl in enumerate(labels)]
    nodes.append(Node("end", END_EVENT))
    flows = [
        Flow(f"f{i}", nodes[i].id, nodes[i + 1].id) for i in range(len(nodes) - 1)
    ]
    return make_graph(process_id, nodes, flows)


def ab_corpus():
    """Two task chains that agree on x, y, z and then diverge to a or b."""

    def bare_chain(pid: str, ids: list[str]) -> ProcessGraph:
        nodes = [Node(i, TASK, i) for i in ids]
        flows = [Flow(f"f{j}", ids[j], ids[j + 1]) for j in range(len(ids) - 1)]
        return make_graph(pid, nodes, flows)

    corpus = [bare_chain("A", ["x", "y", "z", "a"]), bare_chain("B", ["x", "y", "z", "b"])]
    query = bare_chain("C", ["x", "y", "z"])
    return corpus, query


def triple_branch_process(process_id: str) -> ProcessGraph:
    """Ten elements; every recommendation target has exactly three
    distinctly labelled successors."""
    nodes = [
        Node("s", START_EVENT),
        Node("t1", TASK, "Receive order"),
        Node("t2", TASK, "Check stock"),
        Node("u", END_EVENT),
        Node("a", TASK, "Pack items"),
        Node("b", TASK, "Cancel order"),
        Node("c", TASK, "Backorder"),
        Node("e1", TASK, "Ship"),
        Node("e2", TASK, "Bill"),
        Node("e3", TASK, "Archive"),
    ]
    flows = [
        Flow("f1", "s", "t1"),
        Flow("f2", "t1", "t2"),
        Flow("f3", "s", "u"),
        Flow("f4", "t2", "a"),
        Flow("f5", "t2", "b"),
        Flow("f6", "t2", "c"),
        Flow("f7", "a", "e1"),
        Flow("f8", "a", "e2"),
        Flow("f9", "a", "e3"),
    ]
    return make_graph(process_id, nodes, flows)


def twin_corpus(builder, pids=("first", "second")):
    return [builder(pid) for pid in pids]


# --------------------------------------------------------------------------
# random graphs

ALL_TYPES = [
    START_EVENT,
    END_EVENT,
    INTERMEDIATE_EVENT,
    TASK,
    EXCLUSIVE_GATEWAY,
    PARALLEL_GATEWAY,
    INCLUSIVE_GATEWAY,
]

_VOCAB = ["check", "send", "review", "pay", "invoice", "order", "close", "ship"]


def random_graph(
    rng: random.Random,
    process_id: str = "rnd",
    max_nodes: int = 12,
    max_edges: int = 20,
) -> ProcessGraph:
    """Arbitrary directed graph: cycles, self-loops and parallel flows
    are all allowed and all legal for the walk semantics under test."""
    n = rng.randint(1, max_nodes)
    nodes = []
    for i in range(n):
        etype = rng.choice(ALL_TYPES)
        label = (
            None
            if rng.random() < 0.3
            else " ".join(rng.choice(_VOCAB) for _ in range(rng.randint(1, 3)))
        )
        nodes.append(Node(f"n{i}", etype, label))
    flows = [
        Flow(f"e{j}", f"n{rng.randrange(n)}", f"n{rng.randrange(n)}")
        for j in range(rng.randint(0, max_edges))
    ]
    return make_graph(process_id, nodes, flows)


# --------------------------------------------------------------------------
# a real HTTP server for loadtest and acceptance tests


def free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


@pytest.fixture(scope="session")
def live_service():
    """The recommendation service on a real socket, both modes loaded
    with indexes over the built-in load-test workflows."""
    import uvicorn

    from procomplete.loadtest import workload_corpus
    from procomplete.service import create_app

    provider = HashEmbedder(dimension=512)
    corpus = workload_corpus()
    indexes = {
        MODE_WITH_GATEWAYS: build_index(corpus, 3, provider, mode=MODE_WITH_GATEWAYS),
        MODE_TASKS_ONLY: build_index(corpus, 3, provider, mode=MODE_TASKS_ONLY),
    }
    app = create_app(indexes, provider)
    port = free_port()
    config = uvicorn.Config(
        app, host="127.0.0.1", port=port, log_level="warning", access_log=False
    )
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.monotonic() + 10.0
    while not server.started:
        if time.monotonic() > deadline:
            raise RuntimeError("test server did not come up")
        time.sleep(0.02)
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5.0)


# --------------------------------------------------------------------------
# acceptance summary: one visible line per criterion, printed after the run

_CRITERIA: dict[int, str] = {}
_OUTCOMES: dict[int, str] = {}


def register_criterion(number: int, description: str) -> None:
    _CRITERIA[number] = description


def pytest_runtest_logreport(report):
    match = re.search(r"test_criterion_(\d+)", report.nodeid)
    if not match:
        return
    number = int(match.group(1))
    if report.when == "call":
        _OUTCOMES[number] = report.outcome
    elif report.when == "setup" and report.outcome != "passed":
        _OUTCOMES[number] = report.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_OUTCOMES):
        outcome = _OUTCOMES[number]
        status = {"passed": "PASS", "failed": "FAIL"}.get(outcome, outcome.upper())
        description = _CRITERIA.get(number, "")
        terminalreporter.write_line(f"[{status}] criterion {number}: {description}")
