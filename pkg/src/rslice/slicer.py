"""Backward slicing, forward (impact) slicing, and chopping."""
from __future__ import annotations

from dataclasses import dataclass

from rslice.dataflow import DataflowGraph
from rslice.syntax.ast import Node, NodeKind, NormalizedAst
from rslice.syntax.reprint import reprint

_CONTAINERS = (NodeKind.IF, NodeKind.FOR, NodeKind.WHILE, NodeKind.REPEAT, NodeKind.FUNCTION)


class CriterionError(ValueError):
    pass


@dataclass
class SliceResult:
    criteria: list[int]
    ids: set[int]
    code: str
    direction: str

    def sorted_ids(self) -> list[int]:
        return sorted(self.ids)


def resolve_criterion(criterion: str, ast: NormalizedAst) -> int:
    """`$id`, `line:col`, or `line@name` -> NodeId (or CriterionError)."""
    criterion = criterion.strip()
    if criterion.startswith("$"):
        try:
            node_id = int(criterion[1:])
        except ValueError:
            raise CriterionError(f"criterion {criterion!r} is not a node id") from None
        if node_id not in ast.nodes:
            raise CriterionError(f"criterion {criterion!r} is out of range")
        return node_id
    if "@" in criterion:
        line_text, _, name = criterion.partition("@")
        line = _int_or_fail(line_text, criterion)
        matches = [
            node
            for node in ast.nodes.values()
            if node.kind is NodeKind.SYMBOL and node.lexeme == name
            and node.location.start.line == line
        ]
        if not matches:
            raise CriterionError(f"criterion {criterion!r} does not match")
        return min(matches, key=lambda n: n.location.start.col).id
    if ":" in criterion:
        line_text, _, col_text = criterion.partition(":")
        line = _int_or_fail(line_text, criterion)
        col = _int_or_fail(col_text, criterion)
        matches = [
            node
            for node in ast.nodes.values()
            if node.location.start.line == line and node.location.start.col == col
        ]
        if not matches:
            raise CriterionError(f"criterion {criterion!r} does not match")
        return min(matches, key=_span_size).id
    raise CriterionError(f"cannot parse criterion {criterion!r}")


def _int_or_fail(text: str, criterion: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise CriterionError(f"cannot parse criterion {criterion!r}") from None


def _span_size(node: Node) -> tuple[int, int, int]:
    start, end = node.location.start, node.location.end
    return (end.line - start.line, end.col - start.col if end.line == start.line else 1 << 30, node.id)


def _governors(ast: NormalizedAst) -> dict[int, list[int]]:
    """NodeId -> conditions governing it, innermost first."""
    table: dict[int, list[int]] = {}

    def walk(node: Node, stack: list[int]) -> None:
        if stack:
            table[node.id] = list(stack)
        if node.kind is NodeKind.IF:
            cond = node.children[0]
            walk(cond, stack)
            for branch in node.children[1:]:
                walk(branch, stack + [cond.id])
        elif node.kind is NodeKind.WHILE:
            cond, body = node.children
            walk(cond, stack)
            walk(body, stack + [cond.id])
        elif node.kind is NodeKind.FOR:
            var, seq, body = node.children
            walk(var, stack)
            walk(seq, stack)
            walk(body, stack + [seq.id])
        else:
            for child in node.children:
                walk(child, stack)

    walk(ast.root, [])
    return table


def _governed_regions(ast: NormalizedAst) -> dict[int, set[int]]:
    """Condition NodeId -> all node ids it governs."""
    regions: dict[int, set[int]] = {}
    for node_id, governors in _governors(ast).items():
        for governor in governors:
            regions.setdefault(governor, set()).add(node_id)
    return regions


def _to_vertex_node(ast: NormalizedAst, graph: DataflowGraph, node_id: int) -> int:
    """Nearest enclosing node that owns a dataflow vertex (callee symbols,
    argument wrappers and the like hop to their parent expression)."""
    if node_id in graph.vertices:
        return node_id
    current = node_id
    while True:
        parent = ast.parents.get(current)
        if parent is None:
            raise CriterionError(f"criterion node {node_id} has no dataflow vertex")
        if parent in graph.vertices:
            return parent
        current = parent


def _reprint_parents(ast: NormalizedAst, included: set[int]) -> set[int]:
    extra: set[int] = set()
    for node_id in included:
        if node_id not in ast.nodes:
            continue
        for ancestor in ast.ancestors(node_id):
            if ancestor.kind in _CONTAINERS or (
                ancestor.kind is NodeKind.EXPRLIST and ancestor.braced
            ):
                extra.add(ancestor.id)
    return extra


def _closure(
    ast: NormalizedAst,
    graph: DataflowGraph,
    criteria: set[int],
    forward: bool,
) -> set[int]:
    step: dict[int, list[int]] = graph.predecessors() if forward else graph.successors()
    governors = _governors(ast)
    regions = _governed_regions(ast) if forward else {}
    included: set[int] = set()
    work = list(criteria)
    while work:
        node_id = work.pop()
        if node_id in included:
            continue
        included.add(node_id)
        work.extend(step.get(node_id, ()))
        if forward:
            for governed in regions.get(node_id, ()):
                if governed in graph.vertices and governed not in included:
                    work.append(governed)
        else:
            for governor in governors.get(node_id, ()):
                if governor not in included:
                    work.append(governor)
    return included


def _make_result(ast: NormalizedAst, included: set[int], criteria: list[int], direction: str) -> SliceResult:
    included = included | _reprint_parents(ast, included)
    code = reprint(ast, included)
    return SliceResult(criteria, included, code, direction)


def backward_slice(
    ast: NormalizedAst,
    graph: DataflowGraph,
    criteria: set[int],
    registry=None,
) -> SliceResult:
    """Everything that influences the criteria, control dependences included.

    With a registry, `library(pkg)` lines join the slice when the sliced code
    calls a function that the registry attributes to `pkg`.
    """
    start = {_to_vertex_node(ast, graph, c) for c in criteria}
    included = _closure(ast, graph, start, forward=False)
    if registry is not None:
        included |= _used_library_loads(ast, graph, included, registry)
    return _make_result(ast, included, sorted(start), "backward")


def _used_library_loads(ast: NormalizedAst, graph: DataflowGraph, included: set[int], registry) -> set[int]:
    from rslice.dataflow import VertexKind

    called = {
        v.name
        for vid, v in graph.vertices.items()
        if vid in included and v.kind is VertexKind.FUNCTION_CALL and v.name
    }
    extra: set[int] = set()
    loaders = registry.names_tagged("library-load")
    for vid, vertex in graph.vertices.items():
        if vertex.kind is not VertexKind.FUNCTION_CALL or vertex.name not in loaders:
            continue
        for dst, labels in graph.outgoing(vid):
            if "argument" not in labels:
                continue
            package = graph.vertices[dst].name.strip("\"'")
            if any(registry.package_provides(package, fn) for fn in called):
                extra.add(vid)
                extra.add(dst)
    return extra


def forward_slice(ast: NormalizedAst, graph: DataflowGraph, criteria: set[int]) -> SliceResult:
    """Everything influenced by the criteria (the impact slice)."""
    start = {_to_vertex_node(ast, graph, c) for c in criteria}
    included = _closure(ast, graph, start, forward=True)
    return _make_result(ast, included, sorted(start), "forward")


def chop(
    ast: NormalizedAst,
    graph: DataflowGraph,
    sources: set[int],
    sinks: set[int],
) -> SliceResult:
    """Intersection of the forward slice of `sources` with the backward slice
    of `sinks`: the code connecting the two."""
    from_sources = forward_slice(ast, graph, sources)
    to_sinks = backward_slice(ast, graph, sinks)
    included = from_sources.ids & to_sinks.ids
    criteria = sorted(set(from_sources.criteria) | set(to_sinks.criteria))
    kept_criteria = [c for c in criteria if c in included]
    return _make_result(ast, included, kept_criteria, "chop")
