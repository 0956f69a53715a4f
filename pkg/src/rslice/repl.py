"""Interactive read-eval-print loop; all commands start with a colon."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from rslice import controlflow, dataflow
from rslice.analysis import Analysis, analyze
from rslice.linter import LintConfig, lint
from rslice.queries import run_query
from rslice.slicer import CriterionError
from rslice.source import ParseError, SourceText
from rslice.syntax.ast import Node
from rslice.syntax.normalize import parse_and_normalize
from rslice.syntax.parser import parse

HELP = """commands:
  :help                          show this message
  :quit                          leave the repl
  :parse <code|file://path>      show the syntax tree
  :normalize <code|file://path>  show the id-annotated normalized tree
  :dataflow <code|file://path>   dataflow graph as diagram text
  :dataflowascii <code|file://path>  dataflow graph as an edge listing
  :cfg <code|file://path>        control-flow graph as diagram text
  :slice [--forward] <criteria> [code|file://path]  slice by criteria
  :lint <code|file://path>       run the linter
  :query <json> [code|file://path]  run queries against the analysis
anything without a leading colon extends the current session source."""

COMMANDS = (
    ":help", ":quit", ":parse", ":normalize", ":dataflow", ":dataflowascii",
    ":cfg", ":slice", ":lint", ":query",
)


@dataclass
class ReplSession:
    source: str = ""
    analysis: Analysis | None = None
    history: list[str] = field(default_factory=list)
    root: str | None = None
    cwd: str = "."
    done: bool = False

    def load(self, argument: str) -> Analysis:
        """Analyze an inline snippet, a file:// path, or the session source."""
        argument = argument.strip()
        if not argument:
            if self.analysis is None:
                raise ValueError("no source loaded; give code or a file:// path")
            return self.analysis
        if argument.startswith("file://"):
            path = argument[len("file://"):]
            if not os.path.isabs(path):
                path = os.path.join(self.cwd, path)
            if not os.path.isfile(path):
                raise ValueError(f"no such file: {path}")
            return analyze(path, root=self.root)
        return analyze(SourceText(argument, "<repl>"), root=self.root)


def _dump_parse_tree(node: Node, depth: int = 0) -> str:
    lines = [f"{'  ' * depth}{node.label()}"]
    for child in node.children:
        lines.append(_dump_parse_tree(child, depth + 1))
    return "\n".join(lines)


def repl_eval(line: str, session: ReplSession) -> str:
    """Evaluate one repl line and return its printable output."""
    line = line.rstrip("\n")
    if line.strip():
        session.history.append(line)
    stripped = line.strip()
    if not stripped:
        return ""
    if not stripped.startswith(":"):
        return _extend_source(stripped, session)
    command, _, argument = stripped.partition(" ")
    try:
        return _run_command(command, argument, session)
    except (ParseError, CriterionError, ValueError, OSError) as err:
        return f"error: {err}"


def _extend_source(code: str, session: ReplSession) -> str:
    candidate = f"{session.source}\n{code}" if session.source else code
    try:
        analysis = analyze(SourceText(candidate, "<repl>"), root=session.root)
    except ParseError as err:
        return f"error: {err} (session unchanged)"
    session.source = candidate
    session.analysis = analysis
    return (
        f"ok: {len(analysis.graph.vertices)} vertices, "
        f"{len(analysis.graph.edges)} edges"
    )


def _run_command(command: str, argument: str, session: ReplSession) -> str:
    if command == ":help":
        return HELP
    if command == ":quit":
        session.done = True
        return ""
    if command == ":parse":
        source = _argument_source(argument, session)
        return _dump_parse_tree(parse(source))
    if command == ":normalize":
        source = _argument_source(argument, session)
        return parse_and_normalize(source).dump()
    if command == ":dataflow":
        return dataflow.render_mermaid(session.load(argument).graph)
    if command == ":dataflowascii":
        return dataflow.render_ascii(session.load(argument).graph)
    if command == ":cfg":
        analysis = session.load(argument)
        return controlflow.render_mermaid(analysis.cfg, analysis.ast)
    if command == ":slice":
        return _run_slice(argument, session)
    if command == ":lint":
        analysis = session.load(argument)
        report = lint(analysis, LintConfig())
        text = report.render_text(analysis)
        return text if text else "no findings"
    if command == ":query":
        return _run_query(argument, session)
    return f"unknown command {command}, use :help"


def _argument_source(argument: str, session: ReplSession) -> SourceText:
    argument = argument.strip()
    if not argument:
        if not session.source:
            raise ValueError("no source loaded; give code or a file:// path")
        return SourceText(session.source, "<repl>")
    if argument.startswith("file://"):
        analysis = session.load(argument)
        return analysis.r_source
    return SourceText(argument, "<repl>")


def _run_slice(argument: str, session: ReplSession) -> str:
    direction = "backward"
    argument = argument.strip()
    if argument.startswith("--forward"):
        direction = "forward"
        argument = argument[len("--forward"):].strip()
    criteria_text, _, rest = argument.partition(" ")
    if not criteria_text:
        raise ValueError("usage: :slice [--forward] <criterion,...> [code]")
    criteria = [c for c in criteria_text.split(",") if c]
    analysis = session.load(rest)
    result = analysis.slice(criteria, direction)
    header = f"{result.direction} slice of {', '.join(str(c) for c in result.criteria)}: ids {result.sorted_ids()}"
    return f"{header}\n{result.code}" if result.code else header


def _run_query(argument: str, session: ReplSession) -> str:
    argument = argument.strip()
    if not argument:
        raise ValueError("usage: :query <json> [code|file://path]")
    decoder = json.JSONDecoder()
    try:
        payload, consumed = decoder.raw_decode(argument)
    except json.JSONDecodeError as err:
        raise ValueError(f"bad query json: {err}") from None
    rest = argument[consumed:].strip()
    analysis = session.load(rest)
    queries = payload if isinstance(payload, list) else [payload]
    return json.dumps(run_query(analysis, queries), indent=2, ensure_ascii=False)


def run_repl(root: str | None = None) -> int:
    """Interactive loop on stdin/stdout; returns the process exit code."""
    session = ReplSession(root=root, cwd=os.getcwd())
    try:
        import readline

        readline.set_completer(_completer)
        readline.parse_and_bind("tab: complete")
    except ImportError:
        pass
    print("rslice repl — :help lists commands, :quit leaves")
    while not session.done:
        try:
            line = input("R> ")
        except EOFError:
            break
        except KeyboardInterrupt:
            print()
            continue
        output = repl_eval(line, session)
        if output:
            print(output)
    return 0


def _completer(text: str, state: int) -> str | None:
    matches = [c for c in COMMANDS if c.startswith(text)]
    return matches[state] if state < len(matches) else None
