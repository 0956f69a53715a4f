"""Syntax tree nodes shared by the parser and the normalizer."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator

from rslice.source import Range, SourceText


class NodeKind(Enum):
    NUMBER = "Number"
    STRING = "StringLit"
    LOGICAL = "Logical"
    NULL = "Null"
    SYMBOL = "Symbol"
    PARAMETER = "Parameter"
    ARGUMENT = "Argument"
    CALL = "FunctionCall"
    FUNCTION = "FunctionDefinition"
    BINARY = "BinaryOp"
    UNARY = "UnaryOp"
    ASSIGNMENT = "Assignment"
    IF = "If"
    FOR = "For"
    WHILE = "While"
    REPEAT = "Repeat"
    BREAK = "Break"
    NEXT = "Next"
    EXPRLIST = "ExpressionList"
    INDEX = "Index"
    NAMESPACE = "Namespace"
    # parse-tree only; desugared away by normalize()
    PIPE = "Pipe"
    RIGHT_ASSIGN = "RightAssign"


@dataclass
class Node:
    kind: NodeKind
    lexeme: str
    location: Range
    children: list["Node"] = field(default_factory=list)
    op: str | None = None  # operator text for Binary/Unary/Assignment/Index/Namespace/Pipe
    name: str | None = None  # argument name / parameter name
    braced: bool = False  # EXPRLIST produced by a { } block
    id: int = -1  # assigned post-order by normalize()

    def walk(self) -> Iterator["Node"]:
        yield self
        for child in self.children:
            yield from child.walk()

    def label(self) -> str:
        """Short human-readable tag used by tree dumps."""
        extra = self.op or self.name or ""
        if self.kind in (
            NodeKind.NUMBER, NodeKind.STRING, NodeKind.LOGICAL,
            NodeKind.SYMBOL, NodeKind.CALL,
        ):
            extra = self.lexeme
        return f"{self.kind.value}{f' {extra}' if extra else ''}"


@dataclass
class NormalizedAst:
    """Desugared tree with dense post-order ids; every analysis reports against it."""

    root: Node
    source: SourceText
    nodes: dict[int, Node] = field(default_factory=dict)
    parents: dict[int, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.nodes:
            for node in self.root.walk():
                self.nodes[node.id] = node
                for child in node.children:
                    self.parents[child.id] = node.id

    def node(self, node_id: int) -> Node:
        return self.nodes[node_id]

    def parent(self, node_id: int) -> Node | None:
        pid = self.parents.get(node_id)
        return None if pid is None else self.nodes[pid]

    def ancestors(self, node_id: int) -> Iterator[Node]:
        node = self.parent(node_id)
        while node is not None:
            yield node
            node = self.parent(node.id)

    def dump(self, node: Node | None = None, depth: int = 0) -> str:
        """Indented id-annotated tree listing."""
        node = node or self.root
        lines = [f"{'  ' * depth}[{node.id}] {node.label()}"]
        for child in node.children:
            lines.append(self.dump(child, depth + 1))
        return "\n".join(lines)
