// Browser entry point: wires the session to the panels.

import { SliceResponse, WireDiagnostic } from "./protocol.js";
import { SocketLike, UiSession } from "./session.js";
import { attachDependencyHandlers, renderDependencyView } from "./views/dependency.js";
import { parseDiagram, reduceToSelection, renderSvg } from "./views/graph.js";
import { Decorations, renderCodePane, sliceDecorations, unionDecorations } from "./views/highlight.js";
import { hoverText } from "./views/hover.js";

const DEFAULT_CODE = `library(ggplot2)

data <- read.csv("/data/data.csv")
min_age <- 42
by_age <- data |>
    dplyr::filter(age >= min_age)

ggplot(by_age, aes(x=age, y=m)) +
    geom_count()
`;

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

class App {
  session = new UiSession((url) => new WebSocket(url) as unknown as SocketLike);
  decorations: Decorations = { highlighted: [], dimmed: [] };
  activeSlices: SliceResponse[] = [];
  graphKind: "dfg" | "cfg" = "dfg";
  simplifiedCfg = false;
  detailedCfg = false;

  editor = el<HTMLTextAreaElement>("editor");
  codePane = el<HTMLElement>("code-pane");
  depPane = el<HTMLElement>("dependencies");
  problemsPane = el<HTMLElement>("problems");
  graphPane = el<HTMLElement>("graph");
  status = el<HTMLElement>("status");
  tooltip = el<HTMLElement>("tooltip");

  async start(): Promise<void> {
    const url = (el<HTMLInputElement>("server-url")).value;
    this.status.textContent = "connecting…";
    const hello = await this.session.connect(url);
    this.status.textContent = `connected (${JSON.stringify(hello)})`;
    this.editor.value = DEFAULT_CODE;
    await this.analyze();
  }

  async analyze(): Promise<void> {
    const text = this.editor.value;
    this.activeSlices = [];
    this.decorations = { highlighted: [], dimmed: [] };
    try {
      const snapshot = await this.session.analyze(text);
      this.status.textContent =
        `analysis #${snapshot.sequence}: ${snapshot.summary.vertices} vertices, ` +
        `${snapshot.summary.edges} edges, ${snapshot.diagnostics.length} finding(s)`;
    } catch (err) {
      this.status.textContent = `error: ${(err as Error).message}`;
      return;
    }
    this.renderAll();
    await this.renderGraph();
  }

  renderAll(): void {
    this.codePane.innerHTML = renderCodePane(this.session.document, this.decorations);
    this.codePane.querySelectorAll<HTMLElement>(".line").forEach((lineEl) => {
      lineEl.addEventListener("mousemove", (ev) => this.onHover(ev, lineEl));
      lineEl.addEventListener("mouseleave", () => this.hideTooltip());
    });
    this.depPane.innerHTML = renderDependencyView(this.session.snapshot?.dependencies ?? null);
    attachDependencyHandlers(this.depPane, {
      goTo: (line) => this.scrollToLine(line),
      backwardSlice: (line, name) => void this.runSlice(`${line}@${name}`, "backward"),
      impactSlice: (line, name) => void this.runSlice(`${line}@${name}`, "forward"),
    });
    this.renderProblems(this.session.snapshot?.diagnostics ?? []);
  }

  renderProblems(diagnostics: WireDiagnostic[]): void {
    if (!diagnostics.length) {
      this.problemsPane.innerHTML = `<p class="placeholder">no findings</p>`;
      return;
    }
    this.problemsPane.innerHTML = diagnostics
      .map((d, index) => {
        const fix = d.fix
          ? `<button data-fix="${index}">${d.fix.title}</button>`
          : "";
        return (
          `<div class="problem ${d.severity}" data-line="${d.range.line}">` +
          `<span class="loc">${d.range.line}:${d.range.col}</span> ` +
          `<b>${d.rule}</b> ${d.message} ${fix}</div>`
        );
      })
      .join("");
    this.problemsPane.querySelectorAll<HTMLButtonElement>("button[data-fix]").forEach((button) => {
      button.addEventListener("click", () => void this.applyFix(Number(button.dataset.fix)));
    });
    this.problemsPane.querySelectorAll<HTMLElement>(".problem").forEach((problem) => {
      problem.addEventListener("click", () => this.scrollToLine(Number(problem.dataset.line)));
    });
  }

  async applyFix(index: number): Promise<void> {
    try {
      const content = await this.session.applyFix(index);
      this.editor.value = content;
      await this.analyze(); // the problems panel updates from the re-analysis
    } catch (err) {
      this.status.textContent = `fix failed: ${(err as Error).message} (document unchanged)`;
    }
  }

  async runSlice(criterion: string, direction: "backward" | "forward"): Promise<void> {
    try {
      const slice = await this.session.slice([criterion], direction);
      this.activeSlices.push(slice);
      this.decorations = this.activeSlices
        .map((s) => sliceDecorations(this.session.document, s))
        .reduce(unionDecorations);
      this.renderAll();
      await this.renderGraph();
      this.status.textContent = `${direction} slice of ${criterion}: lines ${slice.lines.join(", ")}`;
    } catch (err) {
      this.status.textContent = `slice failed: ${(err as Error).message}`;
    }
  }

  clearSlices(): void {
    this.activeSlices = [];
    this.decorations = { highlighted: [], dimmed: [] };
    this.renderAll();
    void this.renderGraph();
  }

  async renderGraph(): Promise<void> {
    const response = await this.session.request({
      type: "graph",
      kind: this.graphKind,
      simplified: this.simplifiedCfg,
      detail: this.detailedCfg ? "detailed" : "compact",
    });
    if (response.type !== "graph-response") return;
    let graph = parseDiagram(response.diagram);
    if (this.graphKind === "dfg" && this.activeSlices.length) {
      const keep = new Set(this.activeSlices.flatMap((s) => s.ids).map((id) => `n${id}`));
      graph = reduceToSelection(graph, keep);
    }
    this.graphPane.innerHTML = renderSvg(graph);
  }

  scrollToLine(line: number): void {
    const target = this.codePane.querySelector(`[data-line="${line}"]`);
    target?.scrollIntoView({ block: "center" });
    target?.classList.add("flash");
    setTimeout(() => target?.classList.remove("flash"), 600);
  }

  async onHover(ev: MouseEvent, lineEl: HTMLElement): Promise<void> {
    const line = Number(lineEl.dataset.line);
    const textStart = lineEl.querySelector(".no")?.getBoundingClientRect().width ?? 0;
    const approxCol = Math.max(1, Math.round((ev.clientX - lineEl.getBoundingClientRect().left - textStart) / 8));
    const text = await hoverText(
      {
        resolveValue: (c) => this.session.resolveValue(c),
        dfShape: (c) => this.session.dfShape(c),
      },
      this.session.document,
      line,
      approxCol,
    );
    if (text) {
      this.tooltip.textContent = text;
      this.tooltip.style.display = "block";
      this.tooltip.style.left = `${ev.pageX + 12}px`;
      this.tooltip.style.top = `${ev.pageY + 12}px`;
    } else {
      this.hideTooltip();
    }
  }

  hideTooltip(): void {
    this.tooltip.style.display = "none";
  }
}

export function main(): void {
  const app = new App();
  el<HTMLButtonElement>("connect").addEventListener("click", () => void app.start());
  el<HTMLButtonElement>("analyze").addEventListener("click", () => void app.analyze());
  el<HTMLButtonElement>("clear-slices").addEventListener("click", () => app.clearSlices());
  el<HTMLSelectElement>("graph-kind").addEventListener("change", (ev) => {
    app.graphKind = (ev.target as HTMLSelectElement).value as "dfg" | "cfg";
    void app.renderGraph();
  });
  el<HTMLInputElement>("simplified").addEventListener("change", (ev) => {
    app.simplifiedCfg = (ev.target as HTMLInputElement).checked;
    void app.renderGraph();
  });
  el<HTMLInputElement>("detailed").addEventListener("change", (ev) => {
    app.detailedCfg = (ev.target as HTMLInputElement).checked;
    void app.renderGraph();
  });
}

if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", main);
}
