/** The suggestion loop: serialize the model, ask the service, render
 * the latest response — and on accept, extend the model and ask again.
 *
 * At most one request is live at a time; every request gets a sequence
 * number, and a response (or failure) whose number is no longer current
 * is discarded without touching the state.
 */

import { serializeToBpmn } from "./bpmn.js";
import { RecommendationClient, ServiceError } from "./client.js";
import { addElement, connectElements, selectElement } from "./model.js";
import type { EditorState, Suggestion } from "./types.js";

export const NO_SUGGESTION = "no suggestion available";
const PANEL_SIZE = 3;

export interface ControllerOptions {
  k?: number;
  filtered?: boolean;
  mode?: string;
  userId?: string;
}

export class SuggestionController {
  private state: EditorState;
  private seq = 0;
  private inflight: AbortController | null = null;
  private listeners = new Set<(state: EditorState) => void>();

  constructor(
    private readonly client: RecommendationClient,
    initial: EditorState,
    private readonly options: ControllerOptions = {},
  ) {
    this.state = initial;
  }

  getState(): EditorState {
    return this.state;
  }

  subscribe(listener: (state: EditorState) => void): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private setState(partial: Partial<EditorState>): void {
    this.state = { ...this.state, ...partial };
    for (const listener of this.listeners) listener(this.state);
  }

  /** Replace the whole model (e.g. loading a demo); clears the panel. */
  reset(state: EditorState): void {
    this.seq++;
    this.inflight?.abort();
    this.inflight = null;
    this.state = state;
    for (const listener of this.listeners) listener(this.state);
  }

  /** Select an element; selecting a real element asks for suggestions. */
  async select(id: string | null): Promise<void> {
    this.setState(selectElement(this.state, id));
    if (id !== null) await this.requestSuggestions();
  }

  /** Ask the service for next-element suggestions at the selected element. */
  async requestSuggestions(): Promise<void> {
    const target = this.state.selectedElement;
    if (target === null) throw new Error("no element selected");

    const mySeq = ++this.seq;
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    this.setState({ status: { state: "loading" }, banner: null });

    try {
      const response = await this.client.recommend(
        {
          bpmn_xml: serializeToBpmn(this.state),
          task_id: target,
          user_id: this.options.userId ?? "ui",
          k: this.options.k ?? PANEL_SIZE,
          filtered: this.options.filtered ?? false,
          ...(this.options.mode ? { mode: this.options.mode } : {}),
        },
        controller.signal,
      );
      if (mySeq !== this.seq) return; // stale response: a newer request owns the panel
      this.setState({
        pendingSuggestions: response.recommendations.slice(0, PANEL_SIZE),
        suggestionsRequestId: response.request_id,
        status: { state: "idle" },
        banner: response.recommendations.length === 0 ? NO_SUGGESTION : null,
      });
    } catch (err) {
      if (mySeq !== this.seq) return; // stale failure: ignore entirely
      if (err instanceof ServiceError && err.code === "no_slices") {
        this.setState({
          pendingSuggestions: [],
          suggestionsRequestId: err.requestId,
          status: { state: "idle" },
          banner: NO_SUGGESTION,
        });
      } else if (err instanceof ServiceError) {
        this.setState({
          status: { state: "error", text: err.code },
          banner: `${err.code}: ${err.message}`,
        });
      } else {
        this.setState({
          status: { state: "error", text: String(err) },
          banner: String(err),
        });
      }
    } finally {
      if (mySeq === this.seq) this.inflight = null;
    }
  }

  /**
   * Append the suggested element, connect it from the selected one,
   * select it, and immediately ask for the next suggestions.
   */
  async acceptSuggestion(suggestion: Suggestion): Promise<void> {
    if (!this.state.pendingSuggestions.includes(suggestion)) {
      throw new Error("suggestion is not part of the current response");
    }
    const from = this.state.selectedElement;
    if (from === null) throw new Error("no element selected");

    const added = addElement(this.state, suggestion.type, suggestion.label);
    const connected = connectElements(added.state, from, added.id);
    this.setState(selectElement(connected, added.id));
    await this.requestSuggestions();
  }
}
