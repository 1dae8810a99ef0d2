/** Shared type definitions for the editor and the service client. */

export type ElementKind =
  | "StartEvent"
  | "EndEvent"
  | "IntermediateEvent"
  | "Task"
  | "ExclusiveGateway"
  | "ParallelGateway"
  | "InclusiveGateway"
  | "Other";

/** Element type as the service reports it: a kind plus, for "Other", the raw tag name. */
export interface ElementTypeRef {
  kind: ElementKind;
  name?: string;
}

export interface EditorElement {
  id: string;
  label: string | null;
  type: ElementTypeRef;
}

export interface EditorFlow {
  id: string;
  source: string;
  target: string;
}

export interface Explanation {
  matched_slice_text: string;
  source_process_id: string;
  similarity: number;
}

/** One recommendation exactly as the service returned it. */
export interface Suggestion {
  label: string | null;
  type: ElementTypeRef;
  score: number;
  explanation: Explanation;
}

export interface RecommendResponse {
  recommendations: Suggestion[];
  request_id: string;
  latency_ms: number;
}

export type EditorStatus =
  | { state: "idle" }
  | { state: "loading" }
  | { state: "error"; text: string };

export interface EditorState {
  processId: string;
  elements: EditorElement[];
  flows: EditorFlow[];
  /** id of the element the modeler is working on, if any; always present in `elements`. */
  selectedElement: string | null;
  /** Suggestions from the latest completed request only; stale responses never land here. */
  pendingSuggestions: Suggestion[];
  /** request_id of the response the panel currently shows — every rendered suggestion is traceable. */
  suggestionsRequestId: string | null;
  /** Non-blocking notice (machine-readable error code, or the no-suggestion hint). */
  banner: string | null;
  status: EditorStatus;
}
