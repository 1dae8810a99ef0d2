"""Process graphs parsed from BPMN 2.0 XML.

Only the control-flow skeleton is modeled: flow nodes (events, tasks,
gateways) and the sequence flows between them.  Pools, lanes, message
flows, data objects and diagram-interchange geometry are ignored.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property
from pathlib import Path


class ModelError(Exception):
    """Base class for process-model errors."""


class MalformedXmlError(ModelError):
    """The document is not parseable XML."""


class NoProcessFoundError(ModelError):
    """The document contains no usable process definition."""


class DanglingFlowError(ModelError):
    """A sequence flow references a node id that does not exist."""


class UnknownNodeError(ModelError):
    """A node id was requested that is not part of the graph."""


class ElementKind(Enum):
    START_EVENT = "StartEvent"
    END_EVENT = "EndEvent"
    INTERMEDIATE_EVENT = "IntermediateEvent"
    TASK = "Task"
    EXCLUSIVE_GATEWAY = "ExclusiveGateway"
    PARALLEL_GATEWAY = "ParallelGateway"
    INCLUSIVE_GATEWAY = "InclusiveGateway"
    OTHER = "Other"


_DISPLAY_NAMES = {
    ElementKind.START_EVENT: "Start Event",
    ElementKind.END_EVENT: "End Event",
    ElementKind.INTERMEDIATE_EVENT: "Intermediate Event",
    ElementKind.TASK: "Task",
    ElementKind.EXCLUSIVE_GATEWAY: "Exclusive Gateway",
    ElementKind.PARALLEL_GATEWAY: "Parallel Gateway",
    ElementKind.INCLUSIVE_GATEWAY: "Inclusive Gateway",
}

_GATEWAY_KINDS = frozenset(
    {
        ElementKind.EXCLUSIVE_GATEWAY,
        ElementKind.PARALLEL_GATEWAY,
        ElementKind.INCLUSIVE_GATEWAY,
    }
)


def _words_from_tag(tag: str) -> str:
    # "eventBasedGateway" -> "Event Based Gateway"
    spaced = re.sub(r"(?<=[a-z0-9])(?=[A-Z])", " ", tag)
    return " ".join(w.capitalize() for w in spaced.split())


@dataclass(frozen=True)
class ElementType:
    """Node type; ``name`` holds the original tag for OTHER nodes only."""

    kind: ElementKind
    name: str | None = None

    @property
    def display_name(self) -> str:
        if self.kind is ElementKind.OTHER:
            return _words_from_tag(self.name or "element")
        return _DISPLAY_NAMES[self.kind]

    @property
    def is_gateway(self) -> bool:
        if self.kind in _GATEWAY_KINDS:
            return True
        return self.kind is ElementKind.OTHER and "gateway" in (self.name or "").lower()

    @property
    def is_end_event(self) -> bool:
        return self.kind is ElementKind.END_EVENT

    def to_json(self) -> dict:
        if self.kind is ElementKind.OTHER:
            return {"kind": self.kind.value, "name": self.name}
        return {"kind": self.kind.value}

    @staticmethod
    def from_json(data: dict) -> "ElementType":
        kind = ElementKind(data["kind"])
        return ElementType(kind, data.get("name"))


START_EVENT = ElementType(ElementKind.START_EVENT)
END_EVENT = ElementType(ElementKind.END_EVENT)
INTERMEDIATE_EVENT = ElementType(ElementKind.INTERMEDIATE_EVENT)
TASK = ElementType(ElementKind.TASK)
EXCLUSIVE_GATEWAY = ElementType(ElementKind.EXCLUSIVE_GATEWAY)
PARALLEL_GATEWAY = ElementType(ElementKind.PARALLEL_GATEWAY)
INCLUSIVE_GATEWAY = ElementType(ElementKind.INCLUSIVE_GATEWAY)


@dataclass(frozen=True)
class Node:
    id: str
    type: ElementType
    label: str | None = None


@dataclass(frozen=True)
class Flow:
    id: str
    source: str
    target: str


def _collapse_ws(text: str | None) -> str | None:
    if text is None:
        return None
    collapsed = " ".join(text.split())
    return collapsed or None


@dataclass(frozen=True)
class ProcessGraph:
    """Directed graph of flow nodes connected by sequence flows."""

    process_id: str
    nodes: tuple[Node, ...]
    flows: tuple[Flow, ...]

    def __post_init__(self) -> None:
        ids = [n.id for n in self.nodes]
        known = set(ids)
        if len(known) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ModelError(f"duplicate node ids in {self.process_id!r}: {dupes}")
        for f in self.flows:
            if f.source not in known or f.target not in known:
                raise DanglingFlowError(
                    f"flow {f.id!r} references unknown node "
                    f"({f.source!r} -> {f.target!r})"
                )

    @cached_property
    def _by_id(self) -> dict[str, Node]:
        return {n.id: n for n in self.nodes}

    @cached_property
    def _out(self) -> dict[str, tuple[Flow, ...]]:
        out: dict[str, list[Flow]] = {n.id: [] for n in self.nodes}
        for f in self.flows:
            out[f.source].append(f)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def _in(self) -> dict[str, tuple[Flow, ...]]:
        inc: dict[str, list[Flow]] = {n.id: [] for n in self.nodes}
        for f in self.flows:
            inc[f.target].append(f)
        return {k: tuple(v) for k, v in inc.items()}

    @property
    def starts(self) -> tuple[str, ...]:
        return tuple(n.id for n in self.nodes if n.type.kind is ElementKind.START_EVENT)

    @property
    def ends(self) -> tuple[str, ...]:
        return tuple(n.id for n in self.nodes if n.type.kind is ElementKind.END_EVENT)

    def node(self, node_id: str) -> Node:
        try:
            return self._by_id[node_id]
        except KeyError:
            raise UnknownNodeError(
                f"node {node_id!r} not in process {self.process_id!r}"
            ) from None

    def __contains__(self, node_id: str) -> bool:
        return node_id in self._by_id

    def out_flows(self, node_id: str) -> tuple[Flow, ...]:
        self.node(node_id)
        return self._out[node_id]

    def in_flows(self, node_id: str) -> tuple[Flow, ...]:
        self.node(node_id)
        return self._in[node_id]

    def successors(self, node_id: str) -> list[Node]:
        """Direct successors in flow-declaration order."""
        return [self._by_id[f.target] for f in self.out_flows(node_id)]

    def predecessors(self, node_id: str) -> list[Node]:
        """Direct predecessors in flow-declaration order."""
        return [self._by_id[f.source] for f in self.in_flows(node_id)]


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


_KIND_BY_TAG = {
    "startEvent": ElementKind.START_EVENT,
    "endEvent": ElementKind.END_EVENT,
    "intermediateCatchEvent": ElementKind.INTERMEDIATE_EVENT,
    "intermediateThrowEvent": ElementKind.INTERMEDIATE_EVENT,
    "boundaryEvent": ElementKind.INTERMEDIATE_EVENT,
    "task": ElementKind.TASK,
    "userTask": ElementKind.TASK,
    "serviceTask": ElementKind.TASK,
    "scriptTask": ElementKind.TASK,
    "manualTask": ElementKind.TASK,
    "sendTask": ElementKind.TASK,
    "receiveTask": ElementKind.TASK,
    "businessRuleTask": ElementKind.TASK,
    "callActivity": ElementKind.TASK,
    "exclusiveGateway": ElementKind.EXCLUSIVE_GATEWAY,
    "parallelGateway": ElementKind.PARALLEL_GATEWAY,
    "inclusiveGateway": ElementKind.INCLUSIVE_GATEWAY,
}

# Flow-node tags kept as OTHER even when no sequence flow touches them.
_OTHER_FLOW_NODE_TAGS = frozenset(
    {
        "subProcess",
        "adHocSubProcess",
        "transaction",
        "eventBasedGateway",
        "complexGateway",
    }
)


def parse_bpmn(data: bytes | str) -> list[ProcessGraph]:
    """Parse BPMN XML into one graph per non-empty process definition.

    Namespace-agnostic: elements are recognized by local tag name.  Tags
    outside the recognized set become OTHER nodes when sequence flows
    reference them (or when they are well-known container activities).
    """
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise MalformedXmlError(f"not parseable as XML: {exc}") from exc

    graphs: list[ProcessGraph] = []
    processes = [el for el in root.iter() if _local(el.tag) == "process"]
    if _local(root.tag) == "process":
        processes = [root] + [p for p in processes if p is not root]

    for idx, proc in enumerate(processes):
        nodes: list[Node] = []
        candidates: dict[str, str] = {}  # id -> tag, potential OTHER nodes
        flows: list[Flow] = []
        flow_counter = 0
        for child in proc:
            tag = _local(child.tag)
            node_id = child.get("id")
            if tag == "sequenceFlow":
                src, dst = child.get("sourceRef"), child.get("targetRef")
                if not src or not dst:
                    continue
                flow_counter += 1
                flows.append(Flow(node_id or f"flow-{flow_counter}", src, dst))
                continue
            if node_id is None:
                continue
            kind = _KIND_BY_TAG.get(tag)
            if kind is not None:
                nodes.append(Node(node_id, ElementType(kind), _collapse_ws(child.get("name"))))
            elif tag in _OTHER_FLOW_NODE_TAGS:
                nodes.append(
                    Node(node_id, ElementType(ElementKind.OTHER, tag), _collapse_ws(child.get("name")))
                )
            else:
                candidates[node_id] = tag

        referenced = {f.source for f in flows} | {f.target for f in flows}
        present = {n.id for n in nodes}
        for node_id in sorted(candidates.keys() & (referenced - present)):
            tag = candidates[node_id]
            nodes.append(Node(node_id, ElementType(ElementKind.OTHER, tag)))

        if not nodes:
            continue
        graphs.append(
            ProcessGraph(proc.get("id") or f"process-{idx + 1}", tuple(nodes), tuple(flows))
        )

    if not graphs:
        raise NoProcessFoundError("no process definition with flow nodes found")
    return graphs


_TAG_BY_KIND = {
    ElementKind.START_EVENT: "startEvent",
    ElementKind.END_EVENT: "endEvent",
    ElementKind.INTERMEDIATE_EVENT: "intermediateCatchEvent",
    ElementKind.TASK: "task",
    ElementKind.EXCLUSIVE_GATEWAY: "exclusiveGateway",
    ElementKind.PARALLEL_GATEWAY: "parallelGateway",
    ElementKind.INCLUSIVE_GATEWAY: "inclusiveGateway",
}

_BPMN_NS = "http://www.omg.org/spec/BPMN/20100524/MODEL"


def to_bpmn_xml(graph: ProcessGraph) -> bytes:
    """Serialize a graph back to minimal BPMN 2.0 XML."""
    ET.register_namespace("bpmn", _BPMN_NS)
    defs = ET.Element(f"{{{_BPMN_NS}}}definitions")
    proc = ET.SubElement(defs, f"{{{_BPMN_NS}}}process", {"id": graph.process_id})
    for n in graph.nodes:
        if n.type.kind is ElementKind.OTHER:
            tag = n.type.name or "task"
        else:
            tag = _TAG_BY_KIND[n.type.kind]
        attrs = {"id": n.id}
        if n.label is not None:
            attrs["name"] = n.label
        ET.SubElement(proc, f"{{{_BPMN_NS}}}{tag}", attrs)
    for f in graph.flows:
        ET.SubElement(
            proc,
            f"{{{_BPMN_NS}}}sequenceFlow",
            {"id": f.id, "sourceRef": f.source, "targetRef": f.target},
        )
    return ET.tostring(defs, encoding="utf-8", xml_declaration=True)


def contract_gateways(graph: ProcessGraph) -> ProcessGraph:
    """Remove gateway nodes, bridging predecessors to successors.

    Every (non-gateway predecessor, non-gateway successor) pair connected
    through a chain of gateways gains a synthetic flow.  Idempotent, and
    reachability between surviving nodes is preserved.
    """
    kept = [n for n in graph.nodes if not n.type.is_gateway]
    kept_ids = {n.id for n in kept}
    if len(kept) == len(graph.nodes):
        return graph

    def bridge_targets(node_id: str) -> list[str]:
        # Non-gateway nodes reached by crossing one or more gateways.
        reached: list[str] = []
        seen_gateways: set[str] = set()
        stack = [
            f.target
            for f in reversed(graph.out_flows(node_id))
            if f.target not in kept_ids
        ]
        while stack:
            gw = stack.pop()
            if gw in seen_gateways:
                continue
            seen_gateways.add(gw)
            for f in graph.out_flows(gw):
                if f.target in kept_ids:
                    if f.target not in reached:
                        reached.append(f.target)
                else:
                    stack.append(f.target)
        return reached

    flows: list[Flow] = [
        f for f in graph.flows if f.source in kept_ids and f.target in kept_ids
    ]
    connected = {(f.source, f.target) for f in flows}
    for n in kept:
        for target in bridge_targets(n.id):
            if (n.id, target) in connected:
                continue
            connected.add((n.id, target))
            flows.append(Flow(f"synthetic:{n.id}->{target}", n.id, target))

    return ProcessGraph(graph.process_id, tuple(kept), tuple(flows))


def load_corpus(directory: str | Path) -> list[ProcessGraph]:
    """Load every .bpmn/.xml file of a directory, sorted by file name.

    Graphs are re-keyed by file stem (plus the XML process id when a file
    holds several processes) so corpus-wide process ids stay unique.
    Files without any usable process definition are skipped.
    """
    directory = Path(directory)
    paths = sorted(
        p for p in directory.iterdir() if p.suffix.lower() in {".bpmn", ".xml"}
    )
    graphs: list[ProcessGraph] = []
    taken: set[str] = set()
    for path in paths:
        try:
            parsed = parse_bpmn(path.read_bytes())
        except NoProcessFoundError:
            continue
        for g in parsed:
            pid = path.stem if len(parsed) == 1 else f"{path.stem}:{g.process_id}"
            while pid in taken:
                pid += "+"
            taken.add(pid)
            graphs.append(replace(g, process_id=pid))
    return graphs
