/** Serialize the editor model to BPMN 2.0 XML the service can parse. */

import type { EditorState, ElementKind } from "./types.js";

const ELEMENT_TAG: Record<ElementKind, string> = {
  StartEvent: "startEvent",
  EndEvent: "endEvent",
  IntermediateEvent: "intermediateCatchEvent",
  Task: "task",
  ExclusiveGateway: "exclusiveGateway",
  ParallelGateway: "parallelGateway",
  InclusiveGateway: "inclusiveGateway",
  Other: "task",
};

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&apos;");
}

export function serializeToBpmn(state: EditorState): string {
  const lines: string[] = [];
  lines.push('<?xml version="1.0" encoding="UTF-8"?>');
  lines.push(
    '<definitions xmlns="http://www.omg.org/spec/BPMN/20100524/MODEL"' +
      ` id="defs_${escapeXml(state.processId)}"` +
      ' targetNamespace="http://example.org/bpmn">',
  );
  lines.push(`  <process id="${escapeXml(state.processId)}" isExecutable="false">`);
  for (const element of state.elements) {
    const tag = ELEMENT_TAG[element.type.kind];
    const name =
      element.label === null ? "" : ` name="${escapeXml(element.label)}"`;
    lines.push(`    <${tag} id="${escapeXml(element.id)}"${name}/>`);
  }
  for (const flow of state.flows) {
    lines.push(
      `    <sequenceFlow id="${escapeXml(flow.id)}"` +
        ` sourceRef="${escapeXml(flow.source)}" targetRef="${escapeXml(flow.target)}"/>`,
    );
  }
  lines.push("  </process>");
  lines.push("</definitions>");
  return lines.join("\n") + "\n";
}
