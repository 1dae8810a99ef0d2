/** Pure editor-model operations. Every function returns a new state. */

import type { EditorState, EditorElement, ElementTypeRef } from "./types.js";

export function createState(processId: string): EditorState {
  return {
    processId,
    elements: [],
    flows: [],
    selectedElement: null,
    pendingSuggestions: [],
    suggestionsRequestId: null,
    banner: null,
    status: { state: "idle" },
  };
}

function freshId(prefix: string, taken: Set<string>): string {
  for (let i = taken.size + 1; ; i++) {
    const candidate = `${prefix}${i}`;
    if (!taken.has(candidate)) return candidate;
  }
}

/**
 * Append an element. An explicit `id` must be unused; without one a fresh
 * `n<k>` id is generated.  Returns the new state and the element's id.
 */
export function addElement(
  state: EditorState,
  type: ElementTypeRef,
  label: string | null = null,
  id?: string,
): { state: EditorState; id: string } {
  const taken = new Set(state.elements.map((e) => e.id));
  if (id !== undefined && taken.has(id)) {
    throw new Error(`element id already in use: ${id}`);
  }
  const elementId = id ?? freshId("n", taken);
  const element: EditorElement = { id: elementId, label, type };
  return {
    state: { ...state, elements: [...state.elements, element] },
    id: elementId,
  };
}

/** Connect two existing elements with a new sequence flow (parallel flows allowed). */
export function connectElements(
  state: EditorState,
  source: string,
  target: string,
): EditorState {
  const ids = new Set(state.elements.map((e) => e.id));
  for (const endpoint of [source, target]) {
    if (!ids.has(endpoint)) throw new Error(`no such element: ${endpoint}`);
  }
  const taken = new Set(state.flows.map((f) => f.id));
  const flow = { id: freshId("f", taken), source, target };
  return { ...state, flows: [...state.flows, flow] };
}

/** Select an element (or clear the selection with null). */
export function selectElement(state: EditorState, id: string | null): EditorState {
  if (id !== null && !state.elements.some((e) => e.id === id)) {
    throw new Error(`no such element: ${id}`);
  }
  return { ...state, selectedElement: id };
}

export function getElement(state: EditorState, id: string): EditorElement {
  const element = state.elements.find((e) => e.id === id);
  if (!element) throw new Error(`no such element: ${id}`);
  return element;
}
