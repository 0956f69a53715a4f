"""Pipeline orchestration: request -> extracted R source -> ast -> graphs.

An `Analysis` is the immutable state every downstream consumer (queries,
linter, slicer entry points, REPL, server) works against.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable

from rslice.controlflow import Cfg, build_cfg
from rslice.dataflow import DataflowBuilder, DataflowGraph, Environment
from rslice.project import AnalysisRequest, CellMap, extract_r_cells, request_for
from rslice.registry import BuiltInRegistry
from rslice.slicer import (
    SliceResult,
    backward_slice,
    chop,
    forward_slice,
    resolve_criterion,
)
from rslice.source import Range, SourceText
from rslice.syntax.ast import Node, NormalizedAst
from rslice.syntax.normalize import parse_and_normalize
from rslice.values import ShapeInference, ValueResolver

ContextPlugin = Callable[["Analysis"], None]


@dataclass
class Analysis:
    request: AnalysisRequest
    document: SourceText
    r_source: SourceText
    cell_map: CellMap
    ast: NormalizedAst
    graph: DataflowGraph
    exit_env: Environment
    cfg: Cfg
    registry: BuiltInRegistry
    root: str | None = None
    foreign_nodes: dict[int, Node] = field(default_factory=dict)
    context: dict[str, object] = field(default_factory=dict)
    fuel: int = 2

    _resolver: ValueResolver | None = None
    _shapes: ShapeInference | None = None

    @property
    def resolver(self) -> ValueResolver:
        if self._resolver is None:
            self._resolver = ValueResolver(self.ast, self.graph, fuel=self.fuel)
            self._resolver.add_foreign_nodes(self.foreign_nodes)
        return self._resolver

    @property
    def shapes(self) -> ShapeInference:
        if self._shapes is None:
            self._shapes = ShapeInference(
                self.ast, self.graph, resolver=self.resolver, root_dir=self.base_dir()
            )
        return self._shapes

    def base_dir(self) -> str | None:
        if self.root:
            return self.root
        if self.request.kind == "file" and self.request.path:
            return os.path.dirname(os.path.abspath(self.request.path))
        return None

    def node(self, node_id: int) -> Node | None:
        return self.ast.nodes.get(node_id) or self.foreign_nodes.get(node_id)

    def map_location(self, line: int, col: int) -> tuple[int, int]:
        if self.cell_map.covers(line):
            return self.cell_map.to_original(line, col)
        return line, col

    def range_payload(self, location: Range) -> dict:
        start = self.map_location(location.start.line, location.start.col)
        end = self.map_location(location.end.line, location.end.col)
        return {"line": start[0], "col": start[1], "endLine": end[0], "endCol": end[1]}

    def condition_values(self) -> dict[int, object]:
        return {
            cond_node: self.resolver.value_of(cond_node)
            for cond_node in self.cfg.conditions.values()
        }

    # -- slicing entry points ---------------------------------------------

    def resolve_criteria(self, criteria: list[str]) -> set[int]:
        return {resolve_criterion(c, self.ast) for c in criteria}

    def slice_lines(self, result: SliceResult) -> list[int]:
        """Original-document lines covered by the slice's nodes."""
        lines: set[int] = set()
        for node_id in result.ids:
            node = self.ast.nodes.get(node_id)
            if node is None:
                continue
            for line in range(node.location.start.line, node.location.end.line + 1):
                lines.add(self.map_location(line, 1)[0])
        return sorted(lines)

    def slice(self, criteria: list[str], direction: str = "backward") -> SliceResult:
        ids = self.resolve_criteria(criteria)
        if direction == "forward":
            return forward_slice(self.ast, self.graph, ids)
        if direction == "backward":
            return backward_slice(self.ast, self.graph, ids, registry=self.registry)
        raise ValueError(f"unknown slice direction {direction!r}")

    def chop(self, sources: list[str], sinks: list[str]) -> SliceResult:
        return chop(
            self.ast, self.graph,
            self.resolve_criteria(sources), self.resolve_criteria(sinks),
        )


def _source_resolver(base_dir: str | None, root: str | None, seen: set[str]):
    def resolve(path: str) -> NormalizedAst | None:
        for base in (base_dir, root):
            if base is None:
                continue
            candidate = os.path.normpath(os.path.join(base, path))
            if os.path.isfile(candidate):
                if candidate in seen:
                    return None
                seen.add(candidate)
                with open(candidate, encoding="utf-8") as handle:
                    text = handle.read()
                return parse_and_normalize(SourceText(text, candidate))
        return None

    return resolve


def analyze(
    target: AnalysisRequest | SourceText | str,
    registry: BuiltInRegistry | None = None,
    root: str | None = None,
    context_plugins: list[ContextPlugin] | None = None,
    fuel: int = 2,
) -> Analysis:
    """Run the full pipeline on a request, path, or literal code."""
    if isinstance(target, str):
        target = request_for(target)
    if isinstance(target, SourceText):
        target = AnalysisRequest("text", "r", content=target.content)
    document = target.read()
    if target.format in ("rmd", "qmd", "ipynb"):
        r_source, cell_map = extract_r_cells(document, target.format)
    else:
        r_source, cell_map = extract_r_cells(document, "r")
    ast = parse_and_normalize(r_source)

    base_dir = os.path.dirname(os.path.abspath(target.path)) if target.path else root
    seen: set[str] = set()
    if target.path:
        seen.add(os.path.normpath(os.path.abspath(target.path)))
    builder = DataflowBuilder(
        ast, registry or BuiltInRegistry(),
        source_resolver=_source_resolver(base_dir, root, seen),
    )
    graph, exit_env = builder.build()
    cfg = build_cfg(ast)

    analysis = Analysis(
        request=target,
        document=document,
        r_source=r_source,
        cell_map=cell_map,
        ast=ast,
        graph=graph,
        exit_env=exit_env,
        cfg=cfg,
        registry=builder.registry,
        root=root,
        foreign_nodes=builder.foreign_nodes,
        fuel=fuel,
    )
    for plugin in context_plugins or ():
        plugin(analysis)
    return analysis
