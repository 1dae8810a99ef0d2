/** DOM rendering: element list, mini canvas, suggestion panel, banner.
 * Stateless — re-renders from the EditorState on every change. */

import { NO_SUGGESTION } from "./controller.js";
import type { EditorElement, EditorState, ElementKind, Suggestion } from "./types.js";

export interface Handlers {
  onSelect(id: string): void;
  onAccept(suggestion: Suggestion): void;
  onAddElement(kind: ElementKind, label: string | null): void;
  onConnect(source: string, target: string): void;
  onRequest(): void;
}

export const PALETTE: ElementKind[] = [
  "Task",
  "ExclusiveGateway",
  "ParallelGateway",
  "InclusiveGateway",
  "IntermediateEvent",
  "StartEvent",
  "EndEvent",
];

const KIND_LABEL: Record<ElementKind, string> = {
  StartEvent: "Start Event",
  EndEvent: "End Event",
  IntermediateEvent: "Intermediate Event",
  Task: "Task",
  ExclusiveGateway: "Exclusive Gateway",
  ParallelGateway: "Parallel Gateway",
  InclusiveGateway: "Inclusive Gateway",
  Other: "Other",
};

export function describeElement(element: EditorElement): string {
  const kind = KIND_LABEL[element.type.kind];
  return element.label === null ? kind : `${kind}: ${element.label}`;
}

/** Longest-path layering with a cycle guard; returns x/y per element id. */
export function layout(state: EditorState): Map<string, { x: number; y: number }> {
  const layer = new Map<string, number>();
  for (const e of state.elements) layer.set(e.id, 0);
  // relax edges |V| times at most — safe with cycles, exact on DAGs
  for (let pass = 0; pass < state.elements.length; pass++) {
    let changed = false;
    for (const flow of state.flows) {
      const src = layer.get(flow.source);
      const dst = layer.get(flow.target);
      if (src === undefined || dst === undefined) continue;
      if (src + 1 > dst && src + 1 < state.elements.length) {
        layer.set(flow.target, src + 1);
        changed = true;
      }
    }
    if (!changed) break;
  }
  const rows = new Map<number, number>();
  const positions = new Map<string, { x: number; y: number }>();
  for (const element of state.elements) {
    const col = layer.get(element.id) ?? 0;
    const row = rows.get(col) ?? 0;
    rows.set(col, row + 1);
    positions.set(element.id, { x: 30 + col * 150, y: 30 + row * 70 });
  }
  return positions;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

const SVG_NS = "http://www.w3.org/2000/svg";

function renderCanvas(state: EditorState, handlers: Handlers): SVGSVGElement {
  const positions = layout(state);
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("class", "canvas");
  let width = 240;
  let height = 140;
  for (const { x, y } of positions.values()) {
    width = Math.max(width, x + 170);
    height = Math.max(height, y + 90);
  }
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("width", String(width));
  svg.setAttribute("height", String(height));

  const defs = document.createElementNS(SVG_NS, "defs");
  const marker = document.createElementNS(SVG_NS, "marker");
  marker.setAttribute("id", "arrow");
  marker.setAttribute("markerWidth", "8");
  marker.setAttribute("markerHeight", "8");
  marker.setAttribute("refX", "7");
  marker.setAttribute("refY", "3");
  marker.setAttribute("orient", "auto");
  const tip = document.createElementNS(SVG_NS, "path");
  tip.setAttribute("d", "M0,0 L7,3 L0,6 z");
  tip.setAttribute("class", "arrow-tip");
  marker.appendChild(tip);
  defs.appendChild(marker);
  svg.appendChild(defs);

  for (const flow of state.flows) {
    const from = positions.get(flow.source);
    const to = positions.get(flow.target);
    if (!from || !to) continue;
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("class", "flow");
    line.setAttribute("x1", String(from.x + 110));
    line.setAttribute("y1", String(from.y + 20));
    line.setAttribute("x2", String(to.x));
    line.setAttribute("y2", String(to.y + 20));
    line.setAttribute("marker-end", "url(#arrow)");
    svg.appendChild(line);
  }

  for (const element of state.elements) {
    const pos = positions.get(element.id);
    if (!pos) continue;
    const group = document.createElementNS(SVG_NS, "g");
    const selected = element.id === state.selectedElement;
    const kind = element.type.kind;
    const shapeClass =
      kind.endsWith("Gateway") ? "shape gateway" :
      kind.endsWith("Event") ? "shape event" : "shape task";
    group.setAttribute(
      "class",
      `node${selected ? " selected" : ""}`,
    );
    const rect = document.createElementNS(SVG_NS, "rect");
    rect.setAttribute("class", shapeClass);
    rect.setAttribute("x", String(pos.x));
    rect.setAttribute("y", String(pos.y));
    rect.setAttribute("width", "110");
    rect.setAttribute("height", "40");
    rect.setAttribute("rx", kind.endsWith("Event") ? "20" : "6");
    group.appendChild(rect);
    const text = document.createElementNS(SVG_NS, "text");
    text.setAttribute("x", String(pos.x + 55));
    text.setAttribute("y", String(pos.y + 24));
    text.setAttribute("text-anchor", "middle");
    const caption = element.label ?? KIND_LABEL[kind];
    text.textContent = caption.length > 14 ? caption.slice(0, 13) + "…" : caption;
    group.appendChild(text);
    group.addEventListener("click", () => handlers.onSelect(element.id));
    svg.appendChild(group);
  }
  return svg;
}

function renderElementList(state: EditorState, handlers: Handlers): HTMLElement {
  const section = el("section", "elements");
  section.appendChild(el("h2", undefined, "Elements"));
  const list = el("ul", "element-list");
  for (const element of state.elements) {
    const item = el(
      "li",
      element.id === state.selectedElement ? "element selected" : "element",
    );
    item.dataset["id"] = element.id;
    item.appendChild(el("span", "element-id", element.id));
    item.appendChild(el("span", "element-desc", describeElement(element)));
    item.addEventListener("click", () => handlers.onSelect(element.id));
    list.appendChild(item);
  }
  if (state.elements.length === 0) {
    section.appendChild(el("p", "hint", "Add elements to begin."));
  }
  section.appendChild(list);
  return section;
}

function renderPalette(state: EditorState, handlers: Handlers): HTMLElement {
  const section = el("section", "palette");
  section.appendChild(el("h2", undefined, "Add element"));

  const kindSelect = el("select", "palette-kind") as HTMLSelectElement;
  for (const kind of PALETTE) {
    const option = el("option", undefined, KIND_LABEL[kind]) as HTMLOptionElement;
    option.value = kind;
    kindSelect.appendChild(option);
  }
  const labelInput = el("input", "palette-label") as HTMLInputElement;
  labelInput.placeholder = "label (optional)";
  const addButton = el("button", "palette-add", "Add") as HTMLButtonElement;
  addButton.addEventListener("click", () => {
    const label = labelInput.value.trim();
    handlers.onAddElement(kindSelect.value as ElementKind, label === "" ? null : label);
    labelInput.value = "";
  });
  section.append(kindSelect, labelInput, addButton);

  if (state.elements.length >= 2) {
    const connect = el("div", "connect");
    const sourceSelect = el("select", "connect-source") as HTMLSelectElement;
    const targetSelect = el("select", "connect-target") as HTMLSelectElement;
    for (const select of [sourceSelect, targetSelect]) {
      for (const element of state.elements) {
        const option = el("option", undefined, element.id) as HTMLOptionElement;
        option.value = element.id;
        select.appendChild(option);
      }
    }
    const connectButton = el("button", "connect-add", "Connect") as HTMLButtonElement;
    connectButton.addEventListener("click", () =>
      handlers.onConnect(sourceSelect.value, targetSelect.value),
    );
    connect.append(sourceSelect, el("span", undefined, "→"), targetSelect, connectButton);
    section.appendChild(connect);
  }
  return section;
}

function renderSuggestions(state: EditorState, handlers: Handlers): HTMLElement {
  const section = el("section", "suggestions");
  const heading = el("h2", undefined, "Suggestions");
  section.appendChild(heading);

  const refresh = el("button", "request", "Suggest") as HTMLButtonElement;
  refresh.disabled = state.selectedElement === null;
  refresh.addEventListener("click", () => handlers.onRequest());
  section.appendChild(refresh);

  if (state.status.state === "loading") {
    section.appendChild(el("p", "loading", "loading…"));
  }

  if (state.pendingSuggestions.length === 0 && state.status.state === "idle") {
    section.appendChild(el("p", "empty", NO_SUGGESTION));
  }

  const list = el("ol", "suggestion-list");
  for (const suggestion of state.pendingSuggestions) {
    const item = el("li", "suggestion");
    const accept = el("button", "accept") as HTMLButtonElement;
    const caption =
      suggestion.label === null
        ? KIND_LABEL[suggestion.type.kind]
        : `${KIND_LABEL[suggestion.type.kind]}: ${suggestion.label}`;
    accept.textContent = `${caption}  (${suggestion.score.toFixed(3)})`;
    accept.addEventListener("click", () => handlers.onAccept(suggestion));
    item.appendChild(accept);
    item.appendChild(
      el(
        "p",
        "explanation",
        `matched "${suggestion.explanation.matched_slice_text}" from ` +
          `${suggestion.explanation.source_process_id}`,
      ),
    );
    list.appendChild(item);
  }
  section.appendChild(list);

  if (state.suggestionsRequestId !== null) {
    section.appendChild(el("p", "request-id", `response ${state.suggestionsRequestId}`));
  }
  return section;
}

export function render(root: HTMLElement, state: EditorState, handlers: Handlers): void {
  root.textContent = "";

  if (state.banner !== null) {
    root.appendChild(el("div", "banner", state.banner));
  }
  const statusLine = el("div", `status status-${state.status.state}`);
  statusLine.textContent =
    state.status.state === "error" ? `error: ${state.status.text}` : state.status.state;
  root.appendChild(statusLine);

  const columns = el("div", "columns");
  const left = el("div", "column");
  left.appendChild(renderElementList(state, handlers));
  left.appendChild(renderPalette(state, handlers));
  const right = el("div", "column");
  right.appendChild(renderSuggestions(state, handlers));
  columns.append(left, right);
  root.appendChild(columns);

  const canvasBox = el("section", "canvas-box");
  canvasBox.appendChild(el("h2", undefined, "Canvas"));
  canvasBox.appendChild(renderCanvas(state, handlers));
  root.appendChild(canvasBox);
}
