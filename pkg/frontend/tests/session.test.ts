import { describe, expect, it } from "vitest";

import { UiSession } from "../src/session.js";
import { FakeSocket } from "./fake-socket.js";

const EMPTY_REPORT = { libraries: [], reads: [], writes: [], visualizations: [] };

function scripted(handler: (msg: Record<string, unknown>) => Record<string, unknown> | null) {
  let socket: FakeSocket | null = null;
  const session = new UiSession(() => {
    socket = new FakeSocket(handler);
    return socket;
  });
  const helloPromise = session.connect("ws://fake");
  socket!.open();
  return { session, socket: socket!, helloPromise };
}

function defaultHandler(msg: Record<string, unknown>): Record<string, unknown> | null {
  switch (msg.type) {
    case "file-analysis":
      return { type: "file-analysis-response", vertices: 3, edges: 4, diagnostics: 0 };
    case "query":
      return { type: "query-response", results: { dependencies: EMPTY_REPORT } };
    case "lint":
      return { type: "lint-response", diagnostics: [], ruleStatus: {} };
    default:
      return { type: "error", message: `unknown ${msg.type}` };
  }
}

describe("UiSession", () => {
  it("receives the unsolicited hello", async () => {
    const { helloPromise } = scripted(defaultHandler);
    const hello = await helloPromise;
    expect(hello.type).toBe("hello");
  });

  it("pairs responses to requests by id", async () => {
    const { session, socket, helloPromise } = scripted(defaultHandler);
    await helloPromise;
    const [a, b] = await Promise.all([
      session.request({ type: "file-analysis", content: "x <- 1" }),
      session.request({ type: "lint" }),
    ]);
    expect(a.type).toBe("file-analysis-response");
    expect(b.type).toBe("lint-response");
    expect(socket.sent.map((m) => m.id)).toEqual(["c1", "c2"]);
  });

  it("errors become thrown exceptions on typed calls", async () => {
    const { session, helloPromise } = scripted(() => ({ type: "error", message: "nope" }));
    await helloPromise;
    await expect(session.slice(["$1"], "backward")).rejects.toThrow("nope");
  });

  it("builds a snapshot from analysis + dependencies + lint", async () => {
    const { session, helloPromise } = scripted(defaultHandler);
    await helloPromise;
    const snapshot = await session.analyze("x <- 1");
    expect(snapshot.summary.vertices).toBe(3);
    expect(snapshot.dependencies).toEqual(EMPTY_REPORT);
    expect(snapshot.sequence).toBe(1);
  });

  it("drops stale snapshots: the highest sequence wins", async () => {
    let delayFirstLint: (() => void) | null = null;
    let lintCount = 0;
    const { session, socket, helloPromise } = scripted((msg) => {
      if (msg.type === "lint") {
        lintCount += 1;
        if (lintCount === 1) {
          // hold the FIRST analysis's final step until the second finishes
          const held = { type: "lint-response", diagnostics: [], ruleStatus: {}, id: msg.id };
          delayFirstLint = () => socket.push(held);
          return null;
        }
        return { type: "lint-response", diagnostics: [], ruleStatus: {} };
      }
      return defaultHandler(msg);
    });
    await helloPromise;
    const first = session.analyze("old <- 1");
    await new Promise((r) => setTimeout(r, 10));
    const second = await session.analyze("new <- 2");
    expect(second.sequence).toBe(2);
    delayFirstLint!();
    const firstResult = await first;
    // the late first analysis must not clobber the newer snapshot
    expect(session.snapshot?.sequence).toBe(2);
    expect(firstResult.sequence).toBe(2);
  });

  it("every displayed value is traceable to the session log", async () => {
    const { session, helloPromise } = scripted(defaultHandler);
    await helloPromise;
    await session.analyze("x <- 1");
    const types = session.log.map((m) => m.type);
    expect(types).toContain("file-analysis-response");
    expect(types).toContain("query-response");
    expect(types).toContain("lint-response");
  });
});
