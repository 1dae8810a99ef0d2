#!/usr/bin/env python3
"""Write a small demo corpus of BPMN process models and build an index.

Creates four business workflows (order fulfilment, hiring, support
tickets, invoice approval) as .bpmn files, then builds a slice index
over them so the recommender, the evaluation commands, and the HTTP
service have something realistic to work with.

    python3 scripts/make_demo_corpus.py --out demo_corpus
    procomplete serve --index demo_corpus/index.jsonl
"""

import argparse
import sys
from pathlib import Path

from procomplete import (
    END_EVENT,
    EXCLUSIVE_GATEWAY,
    Flow,
    HashEmbedder,
    Node,
    PARALLEL_GATEWAY,
    ProcessGraph,
    START_EVENT,
    TASK,
    build_index,
    save_index,
    to_bpmn_xml,
)


def _graph(process_id: str, nodes: list[Node], edges: list[tuple[str, str]]) -> ProcessGraph:
    flows = [Flow(f"f{i}", src, dst) for i, (src, dst) in enumerate(edges)]
    return ProcessGraph(process_id=process_id, nodes=tuple(nodes), flows=tuple(flows))


def order_fulfilment() -> ProcessGraph:
    nodes = [
        Node("start", START_EVENT),
        Node("receive", TASK, "Receive order"),
        Node("stock", TASK, "Check stock"),
        Node("g_stock", EXCLUSIVE_GATEWAY, "In stock?"),
        Node("backorder", TASK, "Create backorder"),
        Node("split", PARALLEL_GATEWAY),
        Node("pack", TASK, "Pack items"),
        Node("invoice", TASK, "Prepare invoice"),
        Node("join", PARALLEL_GATEWAY),
        Node("ship", TASK, "Ship order"),
        Node("end", END_EVENT),
    ]
    edges = [
        ("start", "receive"), ("receive", "stock"), ("stock", "g_stock"),
        ("g_stock", "backorder"), ("g_stock", "split"), ("backorder", "split"),
        ("split", "pack"), ("split", "invoice"), ("pack", "join"),
        ("invoice", "join"), ("join", "ship"), ("ship", "end"),
    ]
    return _graph("order-fulfilment", nodes, edges)


def hiring() -> ProcessGraph:
    nodes = [
        Node("start", START_EVENT),
        Node("screen", TASK, "Screen application"),
        Node("g_fit", EXCLUSIVE_GATEWAY, "Profile fits?"),
        Node("interview", TASK, "Schedule interview"),
        Node("reject", TASK, "Send rejection"),
        Node("assess", TASK, "Assess interview"),
        Node("g_offer", EXCLUSIVE_GATEWAY, "Make offer?"),
        Node("offer", TASK, "Send offer letter"),
        Node("end", END_EVENT),
    ]
    edges = [
        ("start", "screen"), ("screen", "g_fit"), ("g_fit", "interview"),
        ("g_fit", "reject"), ("interview", "assess"), ("assess", "g_offer"),
        ("g_offer", "offer"), ("g_offer", "reject"), ("offer", "end"),
        ("reject", "end"),
    ]
    return _graph("hiring", nodes, edges)


def support_ticket() -> ProcessGraph:
    nodes = [
        Node("start", START_EVENT),
        Node("open", TASK, "Open ticket"),
        Node("triage", TASK, "Triage issue"),
        Node("g_level", EXCLUSIVE_GATEWAY, "Needs escalation?"),
        Node("resolve", TASK, "Resolve issue"),
        Node("escalate", TASK, "Escalate to engineering"),
        Node("verify", TASK, "Verify fix"),
        Node("close", TASK, "Close ticket"),
        Node("end", END_EVENT),
    ]
    edges = [
        ("start", "open"), ("open", "triage"), ("triage", "g_level"),
        ("g_level", "resolve"), ("g_level", "escalate"), ("escalate", "resolve"),
        ("resolve", "verify"), ("verify", "close"), ("close", "end"),
    ]
    return _graph("support-ticket", nodes, edges)


def invoice_approval() -> ProcessGraph:
    nodes = [
        Node("start", START_EVENT),
        Node("receive", TASK, "Receive invoice"),
        Node("match", TASK, "Match purchase order"),
        Node("g_ok", EXCLUSIVE_GATEWAY, "Amounts match?"),
        Node("clarify", TASK, "Request clarification"),
        Node("approve", TASK, "Approve payment"),
        Node("pay", TASK, "Execute payment"),
        Node("archive", TASK, "Archive invoice"),
        Node("end", END_EVENT),
    ]
    edges = [
        ("start", "receive"), ("receive", "match"), ("match", "g_ok"),
        ("g_ok", "clarify"), ("g_ok", "approve"), ("clarify", "match"),
        ("approve", "pay"), ("pay", "archive"), ("archive", "end"),
    ]
    return _graph("invoice-approval", nodes, edges)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="demo_corpus", help="output directory")
    parser.add_argument("--n", type=int, default=3, help="slice length for the index")
    parser.add_argument("--dimension", type=int, default=512, help="embedding dimension")
    args = parser.parse_args(argv)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    graphs = [order_fulfilment(), hiring(), support_ticket(), invoice_approval()]
    for graph in graphs:
        path = out / f"{graph.process_id}.bpmn"
        path.write_bytes(to_bpmn_xml(graph))
        print(f"wrote {path} ({len(graph.nodes)} elements)")

    provider = HashEmbedder(dimension=args.dimension)
    index = build_index(graphs, slice_length=args.n, provider=provider)
    index_path = out / "index.jsonl"
    save_index(index, index_path)
    print(f"wrote {index_path} ({len(index)} slices, n={args.n})")
    print(f"\ntry:  procomplete serve --index {index_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
