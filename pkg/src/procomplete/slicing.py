"""Path slices of a process graph and their textual rendering.

A slice is a directed walk over exactly ``length`` nodes in which no
sequence flow is traversed twice (nodes may repeat, so loops contribute
finitely many slices).  Textualization turns a slice into one paragraph,
one sentence per node: ``"<type display name>: <label>"``, or the bare
type display name when the node is unlabeled.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import ElementType, Node, ProcessGraph


@dataclass(frozen=True)
class Slice:
    process_id: str
    node_ids: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.node_ids)


@dataclass(frozen=True)
class NextElement:
    """An element that directly follows a slice in its source process."""

    node_id: str
    label: str | None
    type: ElementType


@dataclass(frozen=True)
class SliceWithNext:
    slice: Slice
    next_elements: tuple[NextElement, ...]


def element_sentence(label: str | None, etype: ElementType) -> str:
    if label is None:
        return etype.display_name
    return f"{etype.display_name}: {label}"


def _sentence(node: Node) -> str:
    return element_sentence(node.label, node.type)


def textualize(s: Slice, graph: ProcessGraph) -> str:
    """Render a slice as a period-separated paragraph."""
    sentences = [_sentence(graph.node(nid)) for nid in s.node_ids]
    return ". ".join(sentences) + "."


def next_elements_of(graph: ProcessGraph, node_id: str) -> tuple[NextElement, ...]:
    return tuple(
        NextElement(n.id, n.label, n.type) for n in graph.successors(node_id)
    )


def _walks_from(graph: ProcessGraph, origin: str, length: int) -> list[tuple[str, ...]]:
    walks: list[tuple[str, ...]] = []

    def extend(path: list[str], used_flows: set[str]) -> None:
        if len(path) == length:
            walks.append(tuple(path))
            return
        for f in graph.out_flows(path[-1]):
            if f.id in used_flows:
                continue
            used_flows.add(f.id)
            path.append(f.target)
            extend(path, used_flows)
            path.pop()
            used_flows.remove(f.id)

    extend([origin], set())
    return walks


def _walks_ending_at(graph: ProcessGraph, target: str, length: int) -> list[tuple[str, ...]]:
    walks: list[tuple[str, ...]] = []

    def extend(rev_path: list[str], used_flows: set[str]) -> None:
        if len(rev_path) == length:
            walks.append(tuple(reversed(rev_path)))
            return
        for f in graph.in_flows(rev_path[-1]):
            if f.id in used_flows:
                continue
            used_flows.add(f.id)
            rev_path.append(f.source)
            extend(rev_path, used_flows)
            rev_path.pop()
            used_flows.remove(f.id)

    extend([target], set())
    return walks


def _origin_order(graph: ProcessGraph) -> list[str]:
    # DFS preorder from each start event (flow-declaration tie-break),
    # then any remaining nodes in declaration order.
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


def enumerate_slices(graph: ProcessGraph, length: int) -> list[SliceWithNext]:
    """All slices of exactly ``length`` nodes, each with its next elements.

    Walk origins are visited in DFS preorder from the start events, then
    remaining nodes in declaration order; walks from one origin follow
    flow-declaration order.  A node-id sequence reachable through several
    distinct flow combinations is reported once.
    """
    if length < 1:
        raise ValueError("slice length must be >= 1")
    out: list[SliceWithNext] = []
    emitted: set[tuple[str, ...]] = set()
    for origin in _origin_order(graph):
        for walk in _walks_from(graph, origin, length):
            if walk in emitted:
                continue
            emitted.add(walk)
            out.append(
                SliceWithNext(
                    Slice(graph.process_id, walk),
                    next_elements_of(graph, walk[-1]),
                )
            )
    return out


def extract_slices_ending_at(
    graph: ProcessGraph,
    node_id: str,
    length: int,
    allow_shorter: bool = False,
) -> list[Slice]:
    """All slices of exactly ``length`` nodes whose last node is ``node_id``.

    With ``allow_shorter`` enabled, an empty result falls back to the
    longest shorter length that yields at least one slice.
    """
    if length < 1:
        raise ValueError("slice length must be >= 1")
    graph.node(node_id)  # raises UnknownNodeError
    lengths = range(length, 0, -1) if allow_shorter else (length,)
    for m in lengths:
        walks = _walks_ending_at(graph, node_id, m)
        if walks:
            emitted: set[tuple[str, ...]] = set()
            slices = []
            for w in walks:
                if w not in emitted:
                    emitted.add(w)
                    slices.append(Slice(graph.process_id, w))
            return slices
    return []
