"""Reproducibility-oriented lint rules with quick-fixes.

Eight built-in rules ship; new ones register through `RULES`. Rules that need
a project root deactivate silently without one and say so in the rule-status
side report.
"""
from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from typing import Callable

from rslice.analysis import Analysis
from rslice.controlflow import simplify_cfg
from rslice.dataflow import VertexKind
from rslice.slicer import _governors
from rslice.source import Location, Range, SourceText
from rslice.syntax.ast import Node, NodeKind
from rslice.syntax.tokens import string_value

_IGNORE = re.compile(r"#\s*lint-ignore:\s*([-\w,\s]+)")


@dataclass(frozen=True)
class TextEdit:
    range: Range
    replacement: str


@dataclass
class QuickFix:
    title: str
    edits: list[TextEdit]


@dataclass
class Diagnostic:
    rule: str
    severity: str
    range: Range
    message: str
    fix: QuickFix | None = None
    certainty: str | None = None


@dataclass
class RuleSetting:
    enabled: bool = True
    severity: str | None = None
    options: dict = field(default_factory=dict)


@dataclass
class LintConfig:
    rules: dict[str, RuleSetting] = field(default_factory=dict)
    seed_constant: int = 42
    deprecated: tuple[str, ...] = ("filter_all",)
    rule_filter: list[str] | None = None

    def setting(self, rule_id: str) -> RuleSetting:
        return self.rules.get(rule_id, RuleSetting())


@dataclass
class LintReport:
    diagnostics: list[Diagnostic]
    rule_status: dict[str, str]

    def payload(self, analysis: Analysis) -> dict:
        return {
            "diagnostics": [diagnostic_payload(analysis, d) for d in self.diagnostics],
            "ruleStatus": self.rule_status,
        }

    def render_text(self, analysis: Analysis) -> str:
        origin = analysis.document.origin
        lines = []
        for d in self.diagnostics:
            start = analysis.map_location(d.range.start.line, d.range.start.col)
            lines.append(f"{origin}:{start[0]}:{start[1]} [{d.severity}] {d.rule}: {d.message}")
        return "\n".join(lines)


def diagnostic_payload(analysis: Analysis, diagnostic: Diagnostic) -> dict:
    out = {
        "rule": diagnostic.rule,
        "severity": diagnostic.severity,
        "range": analysis.range_payload(diagnostic.range),
        "message": diagnostic.message,
    }
    if diagnostic.certainty:
        out["certainty"] = diagnostic.certainty
    if diagnostic.fix is not None:
        out["fix"] = {
            "title": diagnostic.fix.title,
            "edits": [
                {
                    "start": {"line": e.range.start.line, "col": e.range.start.col},
                    "end": {"line": e.range.end.line, "col": e.range.end.col},
                    "replacement": e.replacement,
                }
                for e in diagnostic.fix.edits
            ],
        }
    return out


# -- shared helpers ----------------------------------------------------------


def _call_nodes(analysis: Analysis, tags: tuple[str, ...]) -> list[Node]:
    out = []
    for node in analysis.ast.root.walk():
        if node.kind is NodeKind.CALL and analysis.registry.tag_of(node.lexeme) in tags:
            out.append(node)
    return out


def _path_argument(analysis: Analysis, call: Node) -> Node | None:
    semantics = analysis.registry.lookup(call.lexeme)
    args = call.children[1:]
    for arg in args:
        if arg.kind is NodeKind.ARGUMENT and arg.name == semantics.path_arg_name:
            return arg.children[0]
    if semantics.path_arg is None:
        return None
    positional = [a for a in args if not (a.kind is NodeKind.ARGUMENT and a.name)]
    if semantics.path_arg < len(positional):
        arg = positional[semantics.path_arg]
        return arg.children[0] if arg.kind is NodeKind.ARGUMENT else arg
    return None


_DRIVE = re.compile(r"^[A-Za-z]:[/\\]")


def _is_absolute(path: str) -> bool:
    return path.startswith("/") or path.startswith("~") or bool(_DRIVE.match(path))


def _definition_vertices(analysis: Analysis) -> list[int]:
    return [
        vid
        for vid, vertex in sorted(analysis.graph.vertices.items())
        if vertex.kind is VertexKind.VARIABLE_DEFINITION and vid in analysis.ast.nodes
    ]


def _has_reads(analysis: Analysis, def_id: int) -> bool:
    return any("reads" in labels for _, labels in analysis.graph.incoming(def_id))


def _is_super_assign_target(analysis: Analysis, def_id: int) -> bool:
    parent = analysis.ast.parent(def_id)
    return parent is not None and parent.kind is NodeKind.ASSIGNMENT and parent.op == "<<-"


# -- rules -------------------------------------------------------------------


def rule_absolute_file_path(analysis: Analysis, config: LintConfig) -> list[Diagnostic]:
    out = []
    for call in _call_nodes(analysis, ("file-read", "file-write")):
        path_node = _path_argument(analysis, call)
        if path_node is None or path_node.kind is not NodeKind.STRING:
            continue
        path = string_value(path_node.lexeme)
        if not _is_absolute(path):
            continue
        fix = None
        root = analysis.root
        if root:
            absolute_root = os.path.abspath(root)
            expanded = os.path.expanduser(path) if path.startswith("~") else path
            if os.path.isabs(expanded) and os.path.commonpath(
                [absolute_root, os.path.abspath(expanded)]
            ) == absolute_root:
                relative = os.path.relpath(os.path.abspath(expanded), absolute_root)
                fix = QuickFix(
                    f"replace with path relative to the project root",
                    [TextEdit(path_node.location, f'"{relative}"')],
                )
        out.append(Diagnostic(
            "absolute-file-path", "warning", path_node.location,
            f"absolute path {path!r} is not portable", fix=fix, certainty="exact",
        ))
    return out


def rule_invalid_file_path(analysis: Analysis, config: LintConfig) -> list[Diagnostic]:
    out = []
    root = analysis.root
    for call in _call_nodes(analysis, ("file-read",)):
        path_node = _path_argument(analysis, call)
        if path_node is None or path_node.kind is not NodeKind.STRING:
            continue
        path = string_value(path_node.lexeme)
        resolved = path if os.path.isabs(path) else os.path.join(root, path)
        if not os.path.isfile(os.path.expanduser(resolved)):
            out.append(Diagnostic(
                "invalid-file-path", "warning", path_node.location,
                f"file {path!r} does not exist relative to the project root",
                certainty="exact",
            ))
    return out


def rule_df_column_access(analysis: Analysis, config: LintConfig) -> list[Diagnostic]:
    out = []
    shapes = analysis.shapes
    for node in analysis.ast.root.walk():
        if node.kind is NodeKind.INDEX:
            column = _indexed_column(node)
            if column is None:
                continue
            shape = shapes.shape_of(node.children[0].id)
            if not shape.open and column[0] not in shape.columns:
                out.append(Diagnostic(
                    "df-column-access", "error", column[1],
                    f"column {column[0]!r} does not exist "
                    f"(known columns: {', '.join(shape.columns)})",
                    certainty="exact",
                ))
        elif node.kind is NodeKind.CALL and analysis.registry.tag_of(node.lexeme) == "df-verb":
            out.extend(_verb_column_diagnostics(analysis, node))
    return out


def _indexed_column(node: Node) -> tuple[str, Range] | None:
    field = node.children[1] if len(node.children) > 1 else None
    if field is None:
        return None
    if node.op == "$" and field.kind is NodeKind.SYMBOL:
        return field.lexeme, field.location
    if node.op == "[[" and field.kind is NodeKind.STRING and len(node.children) == 2:
        return string_value(field.lexeme), field.location
    return None


def _verb_column_diagnostics(analysis: Analysis, call: Node) -> list[Diagnostic]:
    args = call.children[1:]
    if not args:
        return []
    first = args[0].children[0] if args[0].kind is NodeKind.ARGUMENT else args[0]
    shape = analysis.shapes.shape_of(first.id)
    if shape.open:
        return []
    out = []
    known = set(shape.columns)
    for arg in args[1:]:
        value = arg.children[0] if arg.kind is NodeKind.ARGUMENT else arg
        for symbol in value.walk():
            if symbol.kind is not NodeKind.SYMBOL:
                continue
            if symbol.id not in analysis.graph.unresolved_uses:
                continue  # bound variables are environment references
            if symbol.lexeme not in known:
                out.append(Diagnostic(
                    "df-column-access", "error", symbol.location,
                    f"column {symbol.lexeme!r} does not exist "
                    f"(known columns: {', '.join(shape.columns)})",
                    certainty="exact",
                ))
    return out


def rule_seed_randomness(analysis: Analysis, config: LintConfig) -> list[Diagnostic]:
    from rslice.queries import _block_dominators, _dominates, _statement_blocks

    rng_calls = [
        vid
        for vid, vertex in sorted(analysis.graph.vertices.items())
        if vertex.kind is VertexKind.FUNCTION_CALL
        and analysis.registry.tag_of(vertex.name) == "rng"
        and vid in analysis.ast.nodes
    ]
    if not rng_calls:
        return []
    seed_calls = [
        vid
        for vid, vertex in sorted(analysis.graph.vertices.items())
        if vertex.kind is VertexKind.FUNCTION_CALL
        and analysis.registry.tag_of(vertex.name) == "seed"
    ]
    blocks = _statement_blocks(analysis)
    dominators = _block_dominators(analysis)
    out = []
    first_rng = min(rng_calls, key=lambda v: analysis.graph.vertices[v].location.start)
    first_line = analysis.graph.vertices[first_rng].location.start.line
    indent = ""
    if first_line <= len(analysis.r_source.lines):
        text = analysis.r_source.lines[first_line - 1]
        indent = text[: len(text) - len(text.lstrip())]
    insert_at = Location(first_line, 1)
    fix = QuickFix(
        f"insert set.seed({config.seed_constant}) before the first random call",
        [TextEdit(Range(insert_at, insert_at), f"{indent}set.seed({config.seed_constant})\n")],
    )
    for rng in rng_calls:
        dominated = False
        for seed in seed_calls:
            if _dominates(analysis, blocks, dominators, seed, rng):
                dominated = True
                break
        if not dominated:
            vertex = analysis.graph.vertices[rng]
            out.append(Diagnostic(
                "seed-randomness", "warning", vertex.location,
                f"{vertex.name} draws random numbers without a fixed seed",
                fix=fix, certainty="exact",
            ))
    return out


def rule_unused_definition(analysis: Analysis, config: LintConfig) -> list[Diagnostic]:
    out = []
    for def_id in _definition_vertices(analysis):
        node = analysis.ast.nodes[def_id]
        if node.kind is NodeKind.PARAMETER:
            continue
        if _is_super_assign_target(analysis, def_id):
            continue
        if _has_reads(analysis, def_id):
            continue
        parent = analysis.ast.parent(def_id)
        if parent is None or parent.kind is not NodeKind.ASSIGNMENT:
            continue
        fix = None
        rhs = parent.children[1]
        if rhs.kind in (NodeKind.NUMBER, NodeKind.STRING, NodeKind.LOGICAL, NodeKind.NULL, NodeKind.SYMBOL):
            fix = _removal_fix(analysis, parent)
        vertex = analysis.graph.vertices[def_id]
        out.append(Diagnostic(
            "unused-definition", "warning", vertex.location,
            f"'{vertex.name}' is assigned but never used", fix=fix, certainty="exact",
        ))
    return out


def _removal_fix(analysis: Analysis, statement: Node) -> QuickFix | None:
    start_line = statement.location.start.line
    end_line = statement.location.end.line
    for other in analysis.ast.root.walk():
        if other.id == statement.id or other.location is None:
            continue
        if _contains(statement, other) or _contains(other, statement):
            continue
        if other.location.start.line <= end_line and other.location.end.line >= start_line:
            return None  # the lines carry other code; removal would eat it
    lines = analysis.r_source.lines
    end = Location(end_line + 1, 1) if end_line < len(lines) else Location(end_line, len(lines[end_line - 1]) + 1)
    return QuickFix(
        "remove the unused assignment",
        [TextEdit(Range(Location(start_line, 1), end), "")],
    )


def _contains(outer: Node, inner: Node) -> bool:
    return outer.location.contains(inner.location)


def rule_deprecated_functions(analysis: Analysis, config: LintConfig) -> list[Diagnostic]:
    deprecated = set(config.deprecated) | set(config.setting("deprecated-functions").options.get("names", ()))
    out = []
    for node in analysis.ast.root.walk():
        if node.kind is NodeKind.CALL and node.lexeme in deprecated:
            out.append(Diagnostic(
                "deprecated-functions", "warning", node.location,
                f"{node.lexeme} is deprecated", certainty="exact",
            ))
    return out


def rule_dead_code(analysis: Analysis, config: LintConfig) -> list[Diagnostic]:
    _, dead = simplify_cfg(analysis.cfg, analysis.condition_values())
    out = []
    for block in sorted(dead):
        nodes = [analysis.ast.nodes[n] for n in analysis.cfg.blocks.get(block, []) if n in analysis.ast.nodes]
        if not nodes:
            continue
        start = min(n.location.start for n in nodes)
        end = max(n.location.end for n in nodes)
        out.append(Diagnostic(
            "dead-code", "warning", Range(start, end),
            "this code is unreachable (its condition is constant)", certainty="exact",
        ))
    return out


def rule_overwritten_definition(analysis: Analysis, config: LintConfig) -> list[Diagnostic]:
    governors = _governors(analysis.ast)
    by_name: dict[tuple[str, tuple[int, ...]], list[int]] = {}
    for def_id in _definition_vertices(analysis):
        node = analysis.ast.nodes[def_id]
        if node.kind is NodeKind.PARAMETER or _is_super_assign_target(analysis, def_id):
            continue
        key = (analysis.graph.vertices[def_id].name, tuple(governors.get(def_id, ())))
        by_name.setdefault(key, []).append(def_id)
    out = []
    for (_, _), defs in by_name.items():
        defs.sort(key=lambda d: analysis.ast.nodes[d].location.start)
        for earlier, later in zip(defs, defs[1:]):
            if not _has_reads(analysis, earlier):
                vertex = analysis.graph.vertices[earlier]
                out.append(Diagnostic(
                    "overwritten-definition", "warning", vertex.location,
                    f"'{vertex.name}' is overwritten before any use", certainty="exact",
                ))
    return out


Rule = Callable[[Analysis, LintConfig], list[Diagnostic]]

# rule id -> (implementation, needs project root)
RULES: dict[str, tuple[Rule, bool]] = {
    "absolute-file-path": (rule_absolute_file_path, False),
    "invalid-file-path": (rule_invalid_file_path, True),
    "df-column-access": (rule_df_column_access, False),
    "seed-randomness": (rule_seed_randomness, False),
    "unused-definition": (rule_unused_definition, False),
    "deprecated-functions": (rule_deprecated_functions, False),
    "dead-code": (rule_dead_code, False),
    "overwritten-definition": (rule_overwritten_definition, False),
}


def lint(analysis: Analysis, config: LintConfig | None = None) -> LintReport:
    config = config or LintConfig()
    diagnostics: list[Diagnostic] = []
    status: dict[str, str] = {}
    for rule_id, (rule, needs_root) in RULES.items():
        setting = config.setting(rule_id)
        if config.rule_filter is not None and rule_id not in config.rule_filter:
            status[rule_id] = "filtered"
            continue
        if not setting.enabled:
            status[rule_id] = "disabled"
            continue
        if needs_root and not analysis.root:
            status[rule_id] = "inactive: no project root configured"
            continue
        status[rule_id] = "active"
        found = rule(analysis, config)
        if setting.severity:
            for diagnostic in found:
                diagnostic.severity = setting.severity
        diagnostics.extend(found)
    diagnostics = [d for d in diagnostics if not _silenced(analysis, d)]
    diagnostics.sort(key=lambda d: (d.range.start.line, d.range.start.col, d.rule))
    return LintReport(diagnostics, status)


def _silenced(analysis: Analysis, diagnostic: Diagnostic) -> bool:
    line = diagnostic.range.start.line
    lines = analysis.r_source.lines
    if not 1 <= line <= len(lines):
        return False
    match = _IGNORE.search(lines[line - 1])
    if not match:
        return False
    ids = {part.strip() for part in match.group(1).split(",")}
    return diagnostic.rule in ids


class StaleFixError(ValueError):
    pass


def apply_quickfix(source: SourceText, fix: QuickFix) -> SourceText:
    """Apply the fix's edits back-to-front; stale ranges leave `source` as-is."""
    edits = sorted(fix.edits, key=lambda e: (e.range.start.line, e.range.start.col), reverse=True)
    content = source.content
    for edit in edits:
        try:
            start = source.offset_of(edit.range.start)
            end = source.offset_of(edit.range.end)
        except IndexError as err:
            raise StaleFixError(f"fix no longer applies: {err}") from None
        if start > end:
            raise StaleFixError("fix no longer applies: inverted range")
        content = content[:start] + edit.replacement + content[end:]
    return SourceText(content, source.origin)
