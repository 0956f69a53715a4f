// Client session: request/response pairing over a websocket, plus the
// analysis snapshot. The UI never computes analysis results itself; every
// displayed value comes from a server response recorded in the log.

import {
  AnalysisSummary,
  ApplyFixResponse,
  DependencyReport,
  ErrorResponse,
  LintResponse,
  parseMessage,
  QueryResponse,
  ServerMessage,
  SliceResponse,
  WireDiagnostic,
} from "./protocol.js";

export interface SocketLike {
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  send(data: string): void;
  close(): void;
}

export type SocketFactory = (url: string) => SocketLike;

export interface Snapshot {
  sequence: number;
  summary: AnalysisSummary;
  dependencies: DependencyReport | null;
  diagnostics: WireDiagnostic[];
}

interface Pending {
  resolve: (msg: ServerMessage) => void;
  reject: (err: Error) => void;
}

export class UiSession {
  document = "";
  snapshot: Snapshot | null = null;
  highlight: Set<number> = new Set();
  log: ServerMessage[] = [];

  private socket: SocketLike | null = null;
  private pending = new Map<string, Pending>();
  private nextId = 1;
  private analysisSequence = 0;
  private helloResolvers: Array<(hello: ServerMessage) => void> = [];
  private hello: ServerMessage | null = null;

  constructor(private makeSocket: SocketFactory) {}

  connect(url: string): Promise<ServerMessage> {
    const socket = this.makeSocket(url);
    this.socket = socket;
    socket.onmessage = (ev) => this.onMessage(String(ev.data));
    socket.onclose = () => this.failAll(new Error("connection closed"));
    socket.onerror = () => this.failAll(new Error("connection error"));
    return new Promise((resolve, reject) => {
      this.helloResolvers.push(resolve);
      socket.onopen = () => {
        /* hello arrives unsolicited after open */
      };
      setTimeout(() => reject(new Error("no hello from server")), 10_000);
    });
  }

  private onMessage(raw: string): void {
    const message = parseMessage(raw);
    this.log.push(message);
    if (message.type === "hello") {
      this.hello = message;
      for (const resolve of this.helloResolvers.splice(0)) resolve(message);
      return;
    }
    const id = "id" in message && message.id != null ? String(message.id) : null;
    if (id !== null && this.pending.has(id)) {
      const waiter = this.pending.get(id)!;
      this.pending.delete(id);
      waiter.resolve(message);
    }
  }

  private failAll(err: Error): void {
    for (const [, waiter] of this.pending) waiter.reject(err);
    this.pending.clear();
  }

  request(payload: Record<string, unknown>): Promise<ServerMessage> {
    if (!this.socket) throw new Error("not connected");
    const id = `c${this.nextId++}`;
    const message = { ...payload, id };
    this.socket.send(JSON.stringify(message));
    return new Promise((resolve, reject) => {
      this.pending.set(id, { resolve, reject });
    });
  }

  private expect<T extends ServerMessage>(msg: ServerMessage, type: T["type"]): T {
    if (msg.type === "error") throw new Error((msg as ErrorResponse).message);
    if (msg.type !== type) throw new Error(`expected ${type}, got ${msg.type}`);
    return msg as T;
  }

  /** Analyze `text`; stale responses (an older analysis finishing late) are
   * dropped: the snapshot only ever moves to a higher sequence number. */
  async analyze(text: string): Promise<Snapshot> {
    this.document = text;
    const sequence = ++this.analysisSequence;
    const summary = this.expect<AnalysisSummary>(
      await this.request({ type: "file-analysis", content: text }),
      "file-analysis-response",
    );
    const deps = this.expect<QueryResponse>(
      await this.request({ type: "query", queries: [{ type: "dependencies" }] }),
      "query-response",
    );
    const lintResponse = this.expect<LintResponse>(
      await this.request({ type: "lint" }),
      "lint-response",
    );
    if (this.snapshot && this.snapshot.sequence > sequence) {
      return this.snapshot; // a newer analysis already landed
    }
    this.snapshot = {
      sequence,
      summary,
      dependencies: (deps.results as { dependencies?: DependencyReport }).dependencies ?? null,
      diagnostics: lintResponse.diagnostics,
    };
    return this.snapshot;
  }

  async slice(criteria: string[], direction: "backward" | "forward"): Promise<SliceResponse> {
    return this.expect<SliceResponse>(
      await this.request({ type: "slice", criteria, direction }),
      "slice-response",
    );
  }

  async resolveValue(criterion: string): Promise<string | null> {
    const response = this.expect<QueryResponse>(
      await this.request({ type: "query", queries: [{ type: "resolve-value", criteria: [criterion] }] }),
      "query-response",
    );
    const values = (response.results as {
      "resolve-value"?: { values?: Record<string, string> };
    })["resolve-value"]?.values;
    return values?.[criterion] ?? null;
  }

  async dfShape(criterion: string): Promise<string | null> {
    const response = this.expect<QueryResponse>(
      await this.request({ type: "query", queries: [{ type: "df-shape", criterion }] }),
      "query-response",
    );
    const shape = (response.results as { "df-shape"?: { rendered?: string; error?: string } })["df-shape"];
    if (!shape || shape.error) return null;
    return shape.rendered ?? null;
  }

  async applyFix(diagnosticIndex: number): Promise<string> {
    const response = this.expect<ApplyFixResponse>(
      await this.request({ type: "apply-fix", diagnostic: diagnosticIndex }),
      "apply-fix-response",
    );
    return response.content;
  }

  close(): void {
    this.socket?.close();
  }
}
