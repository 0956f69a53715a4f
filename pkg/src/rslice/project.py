"""Project discovery, notebook code extraction, and location mapping."""
from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from typing import Callable

from rslice.source import SourceText


class ExtractionError(ValueError):
    pass


@dataclass(frozen=True)
class AnalysisRequest:
    kind: str  # 'file' | 'text'
    format: str  # 'r' | 'rmd' | 'qmd' | 'ipynb'
    path: str | None = None
    content: str | None = None

    def read(self) -> SourceText:
        if self.kind == "text":
            return SourceText(self.content or "", "<text>")
        with open(self.path, encoding="utf-8") as handle:
            return SourceText(handle.read(), self.path)


def request_for(path_or_text: str, format: str | None = None) -> AnalysisRequest:
    """Build a request from a `file://` path, a plain path, or literal code."""
    if path_or_text.startswith("file://"):
        path_or_text = path_or_text[len("file://"):]
    if format is None and os.path.exists(path_or_text):
        format = _format_of(path_or_text) or "r"
    if os.path.exists(path_or_text):
        return AnalysisRequest("file", format or "r", path=path_or_text)
    return AnalysisRequest("text", format or "r", content=path_or_text)


@dataclass(frozen=True)
class Cell:
    index: int
    original_start: int
    original_end: int
    extracted_start: int
    extracted_end: int


@dataclass
class CellMap:
    cells: list[Cell] = field(default_factory=list)

    def to_original(self, line: int, col: int) -> tuple[int, int]:
        """Inverse of extraction; columns pass through unchanged."""
        for cell in self.cells:
            if cell.extracted_start <= line <= cell.extracted_end:
                return cell.original_start + (line - cell.extracted_start), col
        raise ExtractionError(f"extracted line {line} is not covered by any cell")

    def covers(self, line: int) -> bool:
        return any(c.extracted_start <= line <= c.extracted_end for c in self.cells)


def map_location(cell_map: CellMap, line: int, col: int) -> tuple[int, int]:
    return cell_map.to_original(line, col)


@dataclass(frozen=True)
class FilePlugin:
    name: str
    extensions: tuple[str, ...]
    extract: Callable[[SourceText], tuple[SourceText, CellMap]]


def extract_r_cells(document: SourceText, format: str) -> tuple[SourceText, CellMap]:
    """Concatenate a notebook's R cells (blank-line separated) with a map back."""
    if format in ("rmd", "qmd"):
        return _extract_fenced(document)
    if format == "ipynb":
        return _extract_ipynb(document)
    if format == "r":
        line_count = len(document.lines)
        cell = Cell(0, 1, line_count, 1, line_count)
        return document, CellMap([cell])
    raise ExtractionError(f"unknown notebook format {format!r}")


_FENCE_OPEN = re.compile(r"^\s*```+\{(?P<lang>[A-Za-z0-9.]+)[^}]*\}\s*$")
_FENCE_CLOSE = re.compile(r"^\s*```+\s*$")


def _extract_fenced(document: SourceText) -> tuple[SourceText, CellMap]:
    lines = document.lines
    cells: list[Cell] = []
    out: list[str] = []
    index = 0
    i = 0
    while i < len(lines):
        match = _FENCE_OPEN.match(lines[i])
        if not match:
            i += 1
            continue
        is_r = match.group("lang").lower() == "r"
        body_start = i + 1
        j = body_start
        while j < len(lines) and not _FENCE_CLOSE.match(lines[j]):
            j += 1
        if j >= len(lines):
            raise ExtractionError(f"{document.origin}:{i + 1}: unterminated code fence")
        if is_r and j > body_start:
            if out:
                out.append("")
            start = len(out) + 1
            out.extend(lines[body_start:j])
            cells.append(Cell(index, body_start + 1, j, start, start + (j - body_start) - 1))
        index += 1
        i = j + 1
    return SourceText("\n".join(out), document.origin), CellMap(cells)


def _extract_ipynb(document: SourceText) -> tuple[SourceText, CellMap]:
    """Jupyter JSON (nbformat >= 4). Original lines refer to the notebook's
    cell linearization: all cell sources concatenated in document order."""
    try:
        notebook = json.loads(document.content)
    except json.JSONDecodeError as err:
        raise ExtractionError(f"{document.origin}:{err.lineno}: malformed notebook JSON") from err
    if not isinstance(notebook, dict) or "cells" not in notebook:
        raise ExtractionError(f"{document.origin}: not a notebook (missing 'cells')")
    meta = notebook.get("metadata", {})
    nb_language = (
        meta.get("kernelspec", {}).get("language")
        or meta.get("language_info", {}).get("name")
        or ""
    ).lower()

    cells: list[Cell] = []
    out: list[str] = []
    original_line = 1
    for index, cell in enumerate(notebook["cells"]):
        source = cell.get("source", "")
        if isinstance(source, list):
            text = "".join(source)
        else:
            text = source
        cell_lines = text.split("\n")
        if cell_lines and cell_lines[-1] == "":
            cell_lines.pop()
        language = (cell.get("metadata", {}).get("language") or nb_language).lower()
        if cell.get("cell_type") == "code" and language == "r" and cell_lines:
            if out:
                out.append("")
            start = len(out) + 1
            out.extend(cell_lines)
            cells.append(Cell(
                index, original_line, original_line + len(cell_lines) - 1,
                start, start + len(cell_lines) - 1,
            ))
        original_line += max(len(cell_lines), 1)
    return SourceText("\n".join(out), document.origin), CellMap(cells)


def default_plugins() -> list[FilePlugin]:
    return [
        FilePlugin("rmd", (".Rmd", ".rmd"), lambda doc: _extract_fenced(doc)),
        FilePlugin("qmd", (".qmd",), lambda doc: _extract_fenced(doc)),
        FilePlugin("ipynb", (".ipynb",), lambda doc: _extract_ipynb(doc)),
    ]


def _format_of(path: str) -> str | None:
    lowered = path.lower()
    if lowered.endswith((".rmd",)):
        return "rmd"
    if lowered.endswith(".qmd"):
        return "qmd"
    if lowered.endswith(".ipynb"):
        return "ipynb"
    if lowered.endswith(".r"):
        return "r"
    return None


@dataclass
class DiscoveryResult:
    requests: list[AnalysisRequest]
    cycles: list[list[str]] = field(default_factory=list)


_SOURCE_REF = re.compile(r"""\bsource\s*\(\s*["']([^"']+)["']""")


def discover(root: str, plugins: list[FilePlugin] | None = None) -> DiscoveryResult:
    """All analyzable files under `root` in loading order: files referenced by
    other files' `source()` string literals come first; ties and cycle members
    fall back to lexicographic path order."""
    if not os.path.isdir(root):
        raise FileNotFoundError(f"cannot read project directory {root!r}")
    plugins = plugins if plugins is not None else default_plugins()
    claimed = {ext.lower(): plugin for plugin in plugins for ext in plugin.extensions}

    files: list[str] = []
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames.sort()
        for name in sorted(filenames):
            ext = os.path.splitext(name)[1].lower()
            if ext in (".r",) or ext in claimed:
                files.append(os.path.join(dirpath, name))
    files.sort(key=lambda p: os.path.relpath(p, root))

    # dependency edges: file -> the files it sources (they must load first)
    deps: dict[str, set[str]] = {path: set() for path in files}
    index = {os.path.normpath(p): p for p in files}
    for path in files:
        try:
            with open(path, encoding="utf-8") as handle:
                text = handle.read()
        except OSError:
            continue
        for ref in _SOURCE_REF.findall(text):
            for base in (os.path.dirname(path), root):
                target = index.get(os.path.normpath(os.path.join(base, ref)))
                if target is not None and target != path:
                    deps[path].add(target)
                    break

    order, cycles = _topological(files, deps, root)
    requests = [AnalysisRequest("file", _format_of(p) or "r", path=p) for p in order]
    return DiscoveryResult(requests, cycles)


def _topological(
    files: list[str], deps: dict[str, set[str]], root: str
) -> tuple[list[str], list[list[str]]]:
    def rel(path: str) -> str:
        return os.path.relpath(path, root)

    order: list[str] = []
    placed: set[str] = set()
    cycles: list[list[str]] = []
    pending = list(files)
    while pending:
        ready = [p for p in pending if not (deps[p] - placed - {p})]
        if ready:
            chosen = min(ready, key=rel)
            order.append(chosen)
            placed.add(chosen)
            pending.remove(chosen)
            continue
        pending_set = set(pending)
        subgraph = {p: [d for d in deps[p] if d in pending_set] for p in pending}
        for scc in _sccs(pending, subgraph):  # dependencies-first order
            if len(scc) > 1:
                members = sorted(scc, key=rel)
                cycles.append([rel(p) for p in members])
                for member in members:
                    order.append(member)
                    placed.add(member)
                    pending.remove(member)
                break
        else:  # pragma: no cover - stuck without a cycle cannot happen
            for path in sorted(pending, key=rel):
                order.append(path)
            pending = []
    return order, cycles


def _sccs(nodes: list[str], edges: dict[str, list[str]]) -> list[list[str]]:
    """Tarjan; components come out dependencies-first."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    result: list[list[str]] = []
    counter = [0]

    def strongconnect(node: str) -> None:
        index[node] = low[node] = counter[0]
        counter[0] += 1
        stack.append(node)
        on_stack.add(node)
        for succ in edges.get(node, ()):
            if succ not in index:
                strongconnect(succ)
                low[node] = min(low[node], low[succ])
            elif succ in on_stack:
                low[node] = min(low[node], index[succ])
        if low[node] == index[node]:
            component = []
            while True:
                top = stack.pop()
                on_stack.discard(top)
                component.append(top)
                if top == node:
                    break
            result.append(component)

    for node in nodes:
        if node not in index:
            strongconnect(node)
    return result
