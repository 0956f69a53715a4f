"""Command-line entry point.

No arguments starts the REPL; `--server` starts the analysis server;
`analyze <path>` runs a one-shot analysis. Exit codes: 0 ok, 1 analysis
error, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys

from rslice.analysis import analyze
from rslice.linter import LintConfig, lint
from rslice.queries import run_query
from rslice.slicer import CriterionError
from rslice.source import ParseError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rslice", description="static analysis for an R subset")
    parser.add_argument("--server", action="store_true", help="start the analysis server")
    parser.add_argument("--ws", action="store_true", help="serve over websocket instead of tcp")
    parser.add_argument("--port", type=int, default=1042)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--root", default=None, help="project root directory")
    sub = parser.add_subparsers(dest="command")
    analyze_cmd = sub.add_parser("analyze", help="analyze a file or piece of code")
    analyze_cmd.add_argument("path")
    analyze_cmd.add_argument("--lint", action="store_true")
    analyze_cmd.add_argument("--slice", metavar="CRITERION", action="append", default=[])
    analyze_cmd.add_argument("--forward", action="store_true", help="forward (impact) slice")
    analyze_cmd.add_argument("--query", metavar="JSON", default=None)
    analyze_cmd.add_argument("--format", choices=("text", "json"), default="text")
    analyze_cmd.add_argument("--root", default=None)
    return parser


def _run_analyze(args: argparse.Namespace) -> int:
    try:
        analysis = analyze(args.path, root=args.root)
    except (ParseError, OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    out: dict = {
        "file": analysis.document.origin,
        "vertices": len(analysis.graph.vertices),
        "edges": len(analysis.graph.edges),
    }
    try:
        if args.lint:
            report = lint(analysis, LintConfig())
            out["lint"] = report.payload(analysis)
        if args.slice:
            result = analysis.slice(args.slice, "forward" if args.forward else "backward")
            out["slice"] = {
                "direction": result.direction,
                "criteria": result.criteria,
                "ids": result.sorted_ids(),
                "code": result.code,
            }
        if args.query:
            payload = json.loads(args.query)
            queries = payload if isinstance(payload, list) else [payload]
            out["query"] = run_query(analysis, queries)
    except (CriterionError, json.JSONDecodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1

    if args.format == "json":
        print(json.dumps(out, indent=2, ensure_ascii=False))
        return 0
    print(f"{out['file']}: {out['vertices']} vertices, {out['edges']} edges")
    if "lint" in out:
        report_lines = [
            f"{d['range']['line']}:{d['range']['col']} [{d['severity']}] {d['rule']}: {d['message']}"
            for d in out["lint"]["diagnostics"]
        ]
        print("\n".join(report_lines) if report_lines else "lint: no findings")
    if "slice" in out:
        print(f"slice ids: {out['slice']['ids']}")
        if out["slice"]["code"]:
            print(out["slice"]["code"])
    if "query" in out:
        print(json.dumps(out["query"], indent=2, ensure_ascii=False))
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "analyze":
        return _run_analyze(args)
    if args.server:
        from rslice.server import serve

        try:
            serve("websocket" if args.ws else "tcp", port=args.port, host=args.host, root=args.root)
        except OSError as err:
            print(f"error: cannot start server: {err}", file=sys.stderr)
            return 1
        return 0
    from rslice.repl import run_repl

    return run_repl(root=args.root)


if __name__ == "__main__":
    sys.exit(main())
