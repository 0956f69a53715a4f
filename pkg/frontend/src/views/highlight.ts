// Slice highlighting: included lines light up, the rest of the code dims.

import { SliceResponse } from "../protocol.js";

export interface Decorations {
  highlighted: number[];
  dimmed: number[];
}

/** The slice's lines (reported by the server) are highlighted; every other
 * non-blank line is dimmed. A `null` slice clears all decorations. */
export function sliceDecorations(documentText: string, slice: SliceResponse | null): Decorations {
  if (slice === null) return { highlighted: [], dimmed: [] };
  const included = new Set(slice.lines);
  const highlighted: number[] = [];
  const dimmed: number[] = [];
  documentText.split("\n").forEach((text, index) => {
    if (text.trim() === "") return; // blank lines carry no code
    if (included.has(index + 1)) highlighted.push(index + 1);
    else dimmed.push(index + 1);
  });
  return { highlighted, dimmed };
}

export function unionDecorations(a: Decorations, b: Decorations): Decorations {
  const highlighted = new Set([...a.highlighted, ...b.highlighted]);
  const dimmed = [...new Set([...a.dimmed, ...b.dimmed])].filter((l) => !highlighted.has(l));
  return {
    highlighted: [...highlighted].sort((x, y) => x - y),
    dimmed: dimmed.sort((x, y) => x - y),
  };
}

/** Renders the document as one <div> per line with decoration classes. */
export function renderCodePane(documentText: string, decorations: Decorations): string {
  const highlighted = new Set(decorations.highlighted);
  const dimmed = new Set(decorations.dimmed);
  return documentText
    .split("\n")
    .map((text, index) => {
      const line = index + 1;
      const cls = highlighted.has(line) ? "line highlight" : dimmed.has(line) ? "line dim" : "line";
      const escaped = text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
      return `<div class="${cls}" data-line="${line}"><span class="no">${line}</span>${escaped || " "}</div>`;
    })
    .join("");
}
