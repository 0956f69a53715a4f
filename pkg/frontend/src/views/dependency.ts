// Dependency view: grouped tree over the server's dependency report.

import { DependencyItem, DependencyReport } from "../protocol.js";

export interface TreeNode {
  label: string;
  line: number;
  col: number;
  children: TreeNode[];
  group: string;
}

export interface TreeGroup {
  title: string;
  items: TreeNode[];
}

const GROUPS: Array<[keyof DependencyReport, string]> = [
  ["libraries", "Libraries"],
  ["reads", "Reads"],
  ["writes", "Writes"],
  ["visualizations", "Visualizations"],
];

function toNode(item: DependencyItem, group: string): TreeNode {
  const detail = item.via ? ` [${item.via}]` : item.value ? ` ${item.value}` : "";
  return {
    label: `${item.name}${detail}`,
    line: item.location.line,
    col: item.location.col,
    group,
    children: (item.linked ?? []).map((linked) => toNode(linked, group)),
  };
}

export function dependencyTree(report: DependencyReport): TreeGroup[] {
  return GROUPS.map(([key, title]) => ({
    title,
    items: (report[key] ?? []).map((item) => toNode(item, title)),
  }));
}

export interface DependencyActions {
  goTo(line: number, col: number): void;
  backwardSlice(line: number, name: string): void;
  impactSlice(line: number, name: string): void;
}

function escapeHtml(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function renderNode(node: TreeNode): string {
  const children = node.children.length
    ? `<ul>${node.children.map(renderNode).join("")}</ul>`
    : "";
  return (
    `<li class="dep-item" data-line="${node.line}" data-col="${node.col}" ` +
    `data-name="${escapeHtml(node.label.split(" ")[0])}">` +
    `${escapeHtml(node.label)} <span class="loc">@${node.line}:${node.col}</span>${children}</li>`
  );
}

/** Renders the report as nested lists; items carry data attributes the app
 * wires to goto/slice actions (left click = goto, context menu = slices). */
export function renderDependencyView(report: DependencyReport | null): string {
  if (report === null) return `<p class="placeholder">no analysis yet</p>`;
  return dependencyTree(report)
    .map((group) => {
      const body = group.items.length
        ? `<ul>${group.items.map(renderNode).join("")}</ul>`
        : `<p class="placeholder">(none)</p>`;
      return `<section class="dep-group"><h3>${group.title}</h3>${body}</section>`;
    })
    .join("");
}

export function attachDependencyHandlers(
  container: HTMLElement,
  actions: DependencyActions,
): void {
  container.querySelectorAll<HTMLElement>(".dep-item").forEach((element) => {
    const line = Number(element.dataset.line);
    const col = Number(element.dataset.col);
    const name = element.dataset.name ?? "";
    element.addEventListener("click", (ev) => {
      ev.stopPropagation();
      actions.goTo(line, col);
    });
    element.addEventListener("contextmenu", (ev) => {
      ev.preventDefault();
      ev.stopPropagation();
      const choice = window.prompt(
        `${name} @ ${line}:${col} — type "b" for backward slice, "i" for impact slice`,
        "i",
      );
      if (choice === "b") actions.backwardSlice(line, name);
      else if (choice === "i") actions.impactSlice(line, name);
    });
  });
}
