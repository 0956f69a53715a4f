"""Analysis server: line-delimited JSON over TCP, or one message per frame
over WebSocket. Every client connection gets an isolated session."""
from __future__ import annotations

import asyncio
import json
from dataclasses import dataclass, field

from rslice import __version__
from rslice.analysis import Analysis, analyze
from rslice.linter import LintConfig, LintReport, apply_quickfix, lint
from rslice.project import AnalysisRequest
from rslice.queries import run_query
from rslice.slicer import CriterionError
from rslice.source import ParseError

PROTOCOL_VERSION = 1


def hello_message() -> dict:
    return {"type": "hello", "version": __version__, "protocol": PROTOCOL_VERSION}


@dataclass
class ServerSession:
    root: str | None = None
    analysis: Analysis | None = None
    lint_report: LintReport | None = None
    lint_config: LintConfig = field(default_factory=LintConfig)

    def require_analysis(self) -> Analysis:
        if self.analysis is None:
            raise ValueError("no analysis yet; send a file-analysis request first")
        return self.analysis


def handle_message(msg: dict, session: ServerSession) -> dict:
    """One request in, exactly one response out; errors stay per-message."""
    if not isinstance(msg, dict) or "type" not in msg:
        return {"type": "error", "message": "message must be an object with a 'type'"}
    msg_id = msg.get("id")
    try:
        response = _dispatch(msg, session)
        response["id"] = msg_id
        return response
    except (ParseError, CriterionError, ValueError, OSError) as err:
        return {"type": "error", "id": msg_id, "message": str(err)}
    except Exception as err:  # never let one request tear down the session
        return {"type": "error", "id": msg_id, "message": f"{type(err).__name__}: {err}"}


def _dispatch(msg: dict, session: ServerSession) -> dict:
    mtype = msg["type"]
    if mtype == "file-analysis":
        return _file_analysis(msg, session)
    if mtype == "query":
        analysis = session.require_analysis()
        return {"type": "query-response", "results": run_query(analysis, msg.get("queries", []))}
    if mtype == "slice":
        analysis = session.require_analysis()
        result = analysis.slice(msg.get("criteria", []), msg.get("direction", "backward"))
        return {
            "type": "slice-response",
            "direction": result.direction,
            "criteria": result.criteria,
            "ids": result.sorted_ids(),
            "lines": analysis.slice_lines(result),
            "code": result.code,
        }
    if mtype == "lint":
        analysis = session.require_analysis()
        session.lint_report = lint(analysis, session.lint_config)
        payload = session.lint_report.payload(analysis)
        return {"type": "lint-response", **payload}
    if mtype == "apply-fix":
        return _apply_fix(msg, session)
    if mtype == "graph":
        return _graph(msg, session)
    raise ValueError(f"unknown request type {mtype!r}")


def _graph(msg: dict, session: ServerSession) -> dict:
    from rslice import controlflow, dataflow

    analysis = session.require_analysis()
    kind = msg.get("kind", "dfg")
    if kind == "dfg":
        return {"type": "graph-response", "kind": "dfg",
                "diagram": dataflow.render_mermaid(analysis.graph), "dead": []}
    if kind == "cfg":
        cfg = analysis.cfg
        dead: set[int] = set()
        if msg.get("simplified"):
            cfg, dead = controlflow.simplify_cfg(cfg, analysis.condition_values())
        ast = None if msg.get("detail") == "detailed" else analysis.ast
        diagram = controlflow.render_mermaid(cfg, ast, dead or None)
        return {"type": "graph-response", "kind": "cfg", "diagram": diagram,
                "dead": sorted(dead)}
    raise ValueError(f"unknown graph kind {kind!r}")


def _file_analysis(msg: dict, session: ServerSession) -> dict:
    if "content" in msg:
        request = AnalysisRequest("text", msg.get("format", "r"), content=msg["content"])
    elif "path" in msg:
        path = msg["path"]
        if path.startswith("file://"):
            path = path[len("file://"):]
        request = AnalysisRequest("file", msg.get("format") or _format_from_path(path), path=path)
    else:
        raise ValueError("file-analysis needs 'content' or 'path'")
    analysis = analyze(request, root=msg.get("root") or session.root)
    session.analysis = analysis
    session.lint_report = lint(analysis, session.lint_config)
    return {
        "type": "file-analysis-response",
        "vertices": len(analysis.graph.vertices),
        "edges": len(analysis.graph.edges),
        "diagnostics": len(session.lint_report.diagnostics),
    }


def _format_from_path(path: str) -> str:
    from rslice.project import _format_of

    return _format_of(path) or "r"


def _apply_fix(msg: dict, session: ServerSession) -> dict:
    analysis = session.require_analysis()
    if session.lint_report is None:
        session.lint_report = lint(analysis, session.lint_config)
    index = msg.get("diagnostic")
    diagnostics = session.lint_report.diagnostics
    if not isinstance(index, int) or not 0 <= index < len(diagnostics):
        raise ValueError(f"diagnostic index {index!r} out of range")
    fix = diagnostics[index].fix
    if fix is None:
        raise ValueError(f"diagnostic {index} has no quick-fix")
    fixed = apply_quickfix(analysis.r_source, fix)
    return {"type": "apply-fix-response", "content": fixed.content}


async def _serve_tcp(host: str, port: int, root: str | None) -> None:
    async def on_connect(reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
        session = ServerSession(root=root)
        writer.write((json.dumps(hello_message()) + "\n").encode())
        await writer.drain()
        try:
            while True:
                line = await reader.readline()
                if not line:
                    break
                response = _handle_raw(line.decode("utf-8", "replace"), session)
                writer.write((json.dumps(response) + "\n").encode())
                await writer.drain()
        except ConnectionError:
            pass
        finally:
            writer.close()

    server = await asyncio.start_server(on_connect, host, port)
    async with server:
        await server.serve_forever()


async def _serve_websocket(host: str, port: int, root: str | None) -> None:
    import websockets

    async def on_connect(connection) -> None:
        session = ServerSession(root=root)
        await connection.send(json.dumps(hello_message()))
        async for raw in connection:
            if isinstance(raw, bytes):
                raw = raw.decode("utf-8", "replace")
            await connection.send(json.dumps(_handle_raw(raw, session)))

    async with websockets.serve(on_connect, host, port):
        await asyncio.Future()


def _handle_raw(raw: str, session: ServerSession) -> dict:
    raw = raw.strip()
    if not raw:
        return {"type": "error", "message": "empty message"}
    try:
        msg = json.loads(raw)
    except json.JSONDecodeError as err:
        return {"type": "error", "message": f"not valid json: {err}"}
    return handle_message(msg, session)


def serve(transport: str = "tcp", port: int = 1042, host: str = "127.0.0.1", root: str | None = None) -> None:
    """Run the analysis server until interrupted."""
    if transport == "websocket":
        asyncio.run(_serve_websocket(host, port, root))
    elif transport == "tcp":
        asyncio.run(_serve_tcp(host, port, root))
    else:
        raise ValueError(f"unknown transport {transport!r}")
