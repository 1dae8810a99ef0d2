/** Application entry point: wires the controller to the DOM. */

import { RecommendationClient } from "./client.js";
import { SuggestionController } from "./controller.js";
import { addElement, connectElements, createState } from "./model.js";
import { render } from "./ui.js";
import type { EditorState, ElementKind } from "./types.js";

const DEFAULT_BASE_URL = "http://127.0.0.1:8080";
const STORAGE_KEY = "procomplete-base-url";

/** Three chained tasks — select the last one to see the suggestion loop. */
export function demoModel(): EditorState {
  let state = createState("editor");
  const ids: string[] = [];
  for (const label of ["x", "y", "z"]) {
    const added = addElement(state, { kind: "Task" }, label);
    state = added.state;
    ids.push(added.id);
  }
  for (let i = 0; i + 1 < ids.length; i++) {
    state = connectElements(state, ids[i]!, ids[i + 1]!);
  }
  return state;
}

function boot(): void {
  const root = document.getElementById("app");
  const urlInput = document.getElementById("base-url") as HTMLInputElement | null;
  const applyButton = document.getElementById("apply-url");
  if (!root || !urlInput || !applyButton) return;

  let baseUrl = localStorage.getItem(STORAGE_KEY) ?? DEFAULT_BASE_URL;
  urlInput.value = baseUrl;

  let controller = makeController(baseUrl);

  function makeController(url: string): SuggestionController {
    const created = new SuggestionController(
      new RecommendationClient(url),
      demoModel(),
    );
    created.subscribe((state) => render(root!, state, handlers(created)));
    render(root!, created.getState(), handlers(created));
    return created;
  }

  function handlers(c: SuggestionController) {
    return {
      onSelect: (id: string) => void c.select(id),
      onAccept: (s: import("./types.js").Suggestion) => void c.acceptSuggestion(s),
      onAddElement: (kind: ElementKind, label: string | null) => {
        const state = c.getState();
        const added = addElement(state, { kind }, label);
        const next =
          state.selectedElement === null
            ? added.state
            : connectElements(added.state, state.selectedElement, added.id);
        c.reset(next);
      },
      onConnect: (source: string, target: string) => {
        c.reset(connectElements(c.getState(), source, target));
      },
      onRequest: () => void c.requestSuggestions(),
    };
  }

  applyButton.addEventListener("click", () => {
    baseUrl = urlInput.value.trim() || DEFAULT_BASE_URL;
    localStorage.setItem(STORAGE_KEY, baseUrl);
    controller = makeController(baseUrl);
  });
}

boot();
