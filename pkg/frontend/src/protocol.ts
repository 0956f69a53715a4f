// Wire protocol spoken by the analysis server (JSON, one object per frame).

export interface WireLocation {
  line: number;
  col: number;
  endLine: number;
  endCol: number;
}

export interface DependencyItem {
  name: string;
  location: WireLocation;
  via?: string;
  value?: string;
  linked?: DependencyItem[];
}

export interface DependencyReport {
  libraries: DependencyItem[];
  reads: DependencyItem[];
  writes: DependencyItem[];
  visualizations: DependencyItem[];
}

export interface WireEdit {
  start: { line: number; col: number };
  end: { line: number; col: number };
  replacement: string;
}

export interface WireDiagnostic {
  rule: string;
  severity: string;
  range: WireLocation;
  message: string;
  certainty?: string;
  fix?: { title: string; edits: WireEdit[] };
}

export interface HelloMessage {
  type: "hello";
  version: string;
  protocol: number;
}

export interface AnalysisSummary {
  type: "file-analysis-response";
  id: string;
  vertices: number;
  edges: number;
  diagnostics: number;
}

export interface SliceResponse {
  type: "slice-response";
  id: string;
  direction: "backward" | "forward";
  criteria: number[];
  ids: number[];
  lines: number[];
  code: string;
}

export interface LintResponse {
  type: "lint-response";
  id: string;
  diagnostics: WireDiagnostic[];
  ruleStatus: Record<string, string>;
}

export interface QueryResponse {
  type: "query-response";
  id: string;
  results: Record<string, unknown>;
}

export interface ApplyFixResponse {
  type: "apply-fix-response";
  id: string;
  content: string;
}

export interface ErrorResponse {
  type: "error";
  id?: string | null;
  message: string;
}

export interface GraphResponse {
  type: "graph-response";
  id: string;
  kind: "dfg" | "cfg";
  diagram: string;
  dead: number[];
}

export type ServerMessage =
  | HelloMessage
  | AnalysisSummary
  | SliceResponse
  | LintResponse
  | QueryResponse
  | ApplyFixResponse
  | GraphResponse
  | ErrorResponse;

export function parseMessage(raw: string): ServerMessage {
  return JSON.parse(raw) as ServerMessage;
}
