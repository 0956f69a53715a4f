// Hover tooltips: find the symbol under the cursor, ask the server for its
// value and data-frame shape, and show whatever it reports.

const SYMBOL = /[A-Za-z._][A-Za-z0-9._]*/g;

export interface SymbolHit {
  name: string;
  line: number;
  col: number;
}

const RESERVED = new Set([
  "if", "else", "for", "while", "repeat", "function",
  "break", "next", "in", "TRUE", "FALSE", "NULL",
]);

/** The symbol covering 1-based (line, col) in `text`, if any. */
export function symbolAt(text: string, line: number, col: number): SymbolHit | null {
  const lines = text.split("\n");
  if (line < 1 || line > lines.length) return null;
  const lineText = lines[line - 1];
  for (const match of lineText.matchAll(SYMBOL)) {
    const start = (match.index ?? 0) + 1;
    const end = start + match[0].length;
    if (start <= col && col < end && !RESERVED.has(match[0])) {
      return { name: match[0], line, col: start };
    }
  }
  return null;
}

export function hoverCriterion(hit: SymbolHit): string {
  return `${hit.line}@${hit.name}`;
}

export interface HoverProvider {
  resolveValue(criterion: string): Promise<string | null>;
  dfShape(criterion: string): Promise<string | null>;
}

/** Tooltip text for a position, or null when there is nothing to show. */
export async function hoverText(
  provider: HoverProvider,
  text: string,
  line: number,
  col: number,
): Promise<string | null> {
  const hit = symbolAt(text, line, col);
  if (hit === null) return null;
  const criterion = hoverCriterion(hit);
  let value: string | null = null;
  try {
    value = await provider.resolveValue(criterion);
  } catch {
    return null;
  }
  if (value && value !== "⊤") return value;
  try {
    const shape = await provider.dfShape(criterion);
    if (shape && shape !== "a data frame") return shape;
  } catch {
    /* fall through */
  }
  return value && value !== "⊤" ? value : null;
}
