// Graph pane: parses the server's flowchart-dialect diagram text and lays it
// out as a simple layered SVG. No analysis happens here; the text is the
// server's, verbatim.

export interface GraphNode {
  id: string;
  label: string;
  classes: string[];
}

export interface GraphEdge {
  from: string;
  to: string;
  label: string;
}

export interface Graph {
  nodes: GraphNode[];
  edges: GraphEdge[];
}

const NODE = /^\s*(\w+)[\[\(]+"(.*)"[\]\)]+\s*$/;
const EDGE = /^\s*(\w+)\s*-->(?:\|(.*)\|)?\s*(\w+)\s*$/;
const CLASS = /^\s*class\s+(\w+)\s+(\w+)\s*$/;

export function parseDiagram(text: string): Graph {
  const nodes = new Map<string, GraphNode>();
  const edges: GraphEdge[] = [];
  for (const line of text.split("\n").slice(1)) {
    const nodeMatch = NODE.exec(line);
    if (nodeMatch) {
      nodes.set(nodeMatch[1], { id: nodeMatch[1], label: nodeMatch[2], classes: [] });
      continue;
    }
    const edgeMatch = EDGE.exec(line);
    if (edgeMatch) {
      edges.push({ from: edgeMatch[1], to: edgeMatch[3], label: edgeMatch[2] ?? "" });
      continue;
    }
    const classMatch = CLASS.exec(line);
    if (classMatch) {
      nodes.get(classMatch[1])?.classes.push(classMatch[2]);
    }
  }
  return { nodes: [...nodes.values()], edges };
}

/** Keep only the nodes in `keep` (ids like n12 / b3) and edges between them.
 * Used to reduce the view to the slice closure of the current selection. */
export function reduceToSelection(graph: Graph, keep: Set<string>): Graph {
  if (keep.size === 0) return graph;
  const nodes = graph.nodes.filter((n) => keep.has(n.id));
  const ids = new Set(nodes.map((n) => n.id));
  return {
    nodes,
    edges: graph.edges.filter((e) => ids.has(e.from) && ids.has(e.to)),
  };
}

/** Breadth-first layering from the roots (nodes without incoming edges). */
export function layers(graph: Graph): string[][] {
  const incoming = new Map<string, number>(graph.nodes.map((n) => [n.id, 0]));
  for (const edge of graph.edges) {
    incoming.set(edge.to, (incoming.get(edge.to) ?? 0) + 1);
  }
  const depth = new Map<string, number>();
  let frontier = graph.nodes.filter((n) => (incoming.get(n.id) ?? 0) === 0).map((n) => n.id);
  if (frontier.length === 0 && graph.nodes.length > 0) frontier = [graph.nodes[0].id];
  frontier.forEach((id) => depth.set(id, 0));
  const queue = [...frontier];
  while (queue.length) {
    const id = queue.shift()!;
    for (const edge of graph.edges) {
      if (edge.from === id && !depth.has(edge.to)) {
        depth.set(edge.to, (depth.get(id) ?? 0) + 1);
        queue.push(edge.to);
      }
    }
  }
  graph.nodes.forEach((n, i) => {
    if (!depth.has(n.id)) depth.set(n.id, i); // disconnected leftovers
  });
  const byDepth = new Map<number, string[]>();
  for (const [id, d] of depth) {
    byDepth.set(d, [...(byDepth.get(d) ?? []), id]);
  }
  return [...byDepth.entries()].sort(([a], [b]) => a - b).map(([, ids]) => ids.sort());
}

const NODE_W = 170;
const NODE_H = 34;
const GAP_X = 30;
const GAP_Y = 56;

function escape(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderSvg(graph: Graph): string {
  const rows = layers(graph);
  const position = new Map<string, { x: number; y: number }>();
  rows.forEach((row, rowIndex) => {
    row.forEach((id, colIndex) => {
      position.set(id, {
        x: 20 + colIndex * (NODE_W + GAP_X),
        y: 20 + rowIndex * (NODE_H + GAP_Y),
      });
    });
  });
  const width = Math.max(1, ...rows.map((r) => r.length)) * (NODE_W + GAP_X) + 40;
  const height = rows.length * (NODE_H + GAP_Y) + 40;
  const parts: string[] = [];
  for (const edge of graph.edges) {
    const from = position.get(edge.from);
    const to = position.get(edge.to);
    if (!from || !to) continue;
    const x1 = from.x + NODE_W / 2;
    const y1 = from.y + NODE_H;
    const x2 = to.x + NODE_W / 2;
    const y2 = to.y;
    parts.push(
      `<line x1="${x1}" y1="${y1}" x2="${x2}" y2="${y2}" class="edge" marker-end="url(#arrow)"/>`,
    );
    if (edge.label) {
      parts.push(
        `<text x="${(x1 + x2) / 2}" y="${(y1 + y2) / 2 - 4}" class="edge-label">${escape(edge.label)}</text>`,
      );
    }
  }
  for (const node of graph.nodes) {
    const at = position.get(node.id);
    if (!at) continue;
    const cls = ["node", ...node.classes].join(" ");
    parts.push(
      `<g class="${cls}"><rect x="${at.x}" y="${at.y}" width="${NODE_W}" height="${NODE_H}" rx="6"/>` +
        `<text x="${at.x + NODE_W / 2}" y="${at.y + NODE_H / 2 + 4}">${escape(node.label)}</text></g>`,
    );
  }
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}">` +
    `<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="7" ` +
    `markerHeight="7" orient="auto-start-reverse"><path d="M 0 0 L 10 5 L 0 10 z"/></marker></defs>` +
    `${parts.join("")}</svg>`
  );
}
