import { describe, expect, it } from "vitest";

import { addElement, connectElements, createState, getElement, selectElement } from "../src/model.js";

describe("editor model", () => {
  it("adds elements with generated unique ids", () => {
    let state = createState("p");
    const first = addElement(state, { kind: "Task" }, "Review");
    const second = addElement(first.state, { kind: "EndEvent" });
    expect(first.id).toBe("n1");
    expect(second.id).toBe("n2");
    expect(second.state.elements.map((e) => e.id)).toEqual(["n1", "n2"]);
    expect(getElement(second.state, "n1").label).toBe("Review");
    expect(getElement(second.state, "n2").label).toBeNull();
  });

  it("skips over explicit ids when generating", () => {
    let state = createState("p");
    state = addElement(state, { kind: "Task" }, "a", "n1").state;
    state = addElement(state, { kind: "Task" }, "b", "n2").state;
    const next = addElement(state, { kind: "Task" }, "c");
    expect(next.id).toBe("n3");
  });

  it("rejects duplicate explicit ids", () => {
    const state = addElement(createState("p"), { kind: "Task" }, null, "x").state;
    expect(() => addElement(state, { kind: "Task" }, null, "x")).toThrow(/already in use/);
  });

  it("connects existing elements and allows parallel flows", () => {
    let state = createState("p");
    state = addElement(state, { kind: "Task" }, null, "a").state;
    state = addElement(state, { kind: "Task" }, null, "b").state;
    state = connectElements(state, "a", "b");
    state = connectElements(state, "a", "b");
    expect(state.flows).toEqual([
      { id: "f1", source: "a", target: "b" },
      { id: "f2", source: "a", target: "b" },
    ]);
  });

  it("rejects flows to unknown elements", () => {
    const state = addElement(createState("p"), { kind: "Task" }, null, "a").state;
    expect(() => connectElements(state, "a", "ghost")).toThrow(/no such element/);
    expect(() => connectElements(state, "ghost", "a")).toThrow(/no such element/);
  });

  it("selection must reference an existing element", () => {
    const state = addElement(createState("p"), { kind: "Task" }, null, "a").state;
    expect(selectElement(state, "a").selectedElement).toBe("a");
    expect(selectElement(state, null).selectedElement).toBeNull();
    expect(() => selectElement(state, "ghost")).toThrow(/no such element/);
  });

  it("operations never mutate the input state", () => {
    const original = addElement(createState("p"), { kind: "Task" }, null, "a").state;
    const elementsBefore = original.elements.slice();
    const flowsBefore = original.flows.slice();
    addElement(original, { kind: "Task" });
    const connected = connectElements(
      addElement(original, { kind: "Task" }, null, "b").state,
      "a",
      "b",
    );
    selectElement(connected, "b");
    expect(original.elements).toEqual(elementsBefore);
    expect(original.flows).toEqual(flowsBefore);
    expect(original.selectedElement).toBeNull();
  });
});
