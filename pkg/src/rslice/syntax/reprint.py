"""Line-based reconstruction of node subsets back to source text."""
from __future__ import annotations

from rslice.syntax.ast import Node, NodeKind, NormalizedAst

_CONTROL = (NodeKind.IF, NodeKind.FOR, NodeKind.WHILE, NodeKind.REPEAT, NodeKind.FUNCTION)


def _header_end_line(node: Node) -> int:
    """Last line of the part of a control construct before its body."""
    if node.kind is NodeKind.IF or node.kind is NodeKind.WHILE:
        return node.children[0].location.end.line
    if node.kind is NodeKind.FOR:
        return node.children[1].location.end.line
    if node.kind is NodeKind.FUNCTION:
        params = node.children[:-1]
        return params[-1].location.end.line if params else node.location.start.line
    return node.location.start.line


def _contribute(node: Node, lines: set[int]) -> None:
    if node.kind in _CONTROL:
        lines.update(range(node.location.start.line, _header_end_line(node) + 1))
        # brace lines of every braced branch keep `} else {` pairings intact
        body_children = node.children[2:] if node.kind is NodeKind.FOR else node.children[1:]
        if node.kind is NodeKind.FUNCTION:
            body_children = node.children[-1:]
        if node.kind is NodeKind.REPEAT:
            body_children = node.children
        for child in body_children:
            if child.kind is NodeKind.EXPRLIST and child.braced:
                lines.add(child.location.start.line)
                lines.add(child.location.end.line)
    elif node.kind is NodeKind.EXPRLIST:
        if node.braced:
            lines.add(node.location.start.line)
            lines.add(node.location.end.line)
    else:
        lines.update(range(node.location.start.line, node.location.end.line + 1))


def reprint(ast: NormalizedAst, keep: set[int]) -> str:
    """Emit, in original order, every source line containing a kept node.

    Control-structure headers and braces of kept containers are included so
    the result parses. Ids absent from `ast` are ignored (a graph may carry
    nodes inlined from other files). Trailing whitespace is dropped.
    """
    lines: set[int] = set()
    for node_id in keep:
        node = ast.nodes.get(node_id)
        if node is not None:
            _contribute(node, lines)
    source_lines = ast.source.lines
    kept = [source_lines[n - 1].rstrip() for n in sorted(lines) if 1 <= n <= len(source_lines)]
    return "\n".join(kept)
