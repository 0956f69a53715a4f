"""Desugaring and id assignment.

Pipes become ordinary calls with the left operand as first argument,
right-assignments are flipped, and every node receives a dense post-order id.
"""
from __future__ import annotations

from rslice.source import SourceText
from rslice.syntax.ast import Node, NodeKind, NormalizedAst
from rslice.syntax.parser import callee_name, parse


def _desugar(node: Node) -> Node:
    children = [_desugar(child) for child in node.children]

    if node.kind is NodeKind.PIPE:
        lhs, rhs = children
        injected = Node(NodeKind.ARGUMENT, "", lhs.location, [lhs])
        if rhs.kind is NodeKind.CALL:
            callee, *args = rhs.children
            return Node(NodeKind.CALL, rhs.lexeme, node.location, [callee, injected, *args])
        # bare-function pipe: a %>% f  ==>  f(a)
        return Node(NodeKind.CALL, callee_name(rhs), node.location, [rhs, injected])

    if node.kind is NodeKind.RIGHT_ASSIGN:
        value, target = children
        return Node(NodeKind.ASSIGNMENT, "<-", node.location, [target, value], op="<-")

    clone = Node(
        node.kind, node.lexeme, node.location, children,
        op=node.op, name=node.name, braced=node.braced,
    )
    return clone


def _assign_ids(node: Node, counter: list[int]) -> None:
    for child in node.children:
        _assign_ids(child, counter)
    node.id = counter[0]
    counter[0] += 1


def normalize(tree: Node, source: SourceText | str | None = None) -> NormalizedAst:
    """Desugar `tree` and number its nodes post-order, left to right."""
    if isinstance(source, str) or source is None:
        source = SourceText(source if isinstance(source, str) else "")
    root = _desugar(tree)
    _assign_ids(root, [0])
    return NormalizedAst(root, source)


def parse_and_normalize(source: SourceText | str) -> NormalizedAst:
    if isinstance(source, str):
        source = SourceText(source)
    return normalize(parse(source), source)
