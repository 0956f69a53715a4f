"""Interprocedural dataflow graph construction.

The graph is keyed by the NormalizedAst node ids. Function bodies are
analyzed once, at the first call site, with a parameter frame stacked on the
caller's environment; loop bodies are re-analyzed to a fixpoint (binding sets
only grow, so |nodes| iterations bound termination).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from rslice.registry import BuiltInRegistry
from rslice.source import Range
from rslice.syntax.ast import Node, NodeKind, NormalizedAst

LABEL_ORDER = ("reads", "returns", "defined-by", "defined-by-on-call", "calls", "argument")


class VertexKind(Enum):
    VALUE = "Value"
    USE = "Use"
    VARIABLE_DEFINITION = "VariableDefinition"
    FUNCTION_DEFINITION = "FunctionDefinition"
    FUNCTION_CALL = "FunctionCall"


@dataclass
class DfVertex:
    id: int
    kind: VertexKind
    name: str
    location: Range


@dataclass
class DataflowGraph:
    vertices: dict[int, DfVertex] = field(default_factory=dict)
    # insertion-ordered; labels on one (from, to) pair merge into a single edge
    edges: dict[tuple[int, int], set[str]] = field(default_factory=dict)
    unresolved_uses: set[int] = field(default_factory=set)
    unresolved_calls: set[int] = field(default_factory=set)

    def add_vertex(self, node_id: int, kind: VertexKind, name: str, location: Range) -> int:
        if node_id not in self.vertices:
            self.vertices[node_id] = DfVertex(node_id, kind, name, location)
        return node_id

    def add_edge(self, src: int, dst: int, *labels: str) -> None:
        assert src in self.vertices and dst in self.vertices
        self.edges.setdefault((src, dst), set()).update(labels)

    def outgoing(self, src: int) -> list[tuple[int, set[str]]]:
        return [(dst, labels) for (s, dst), labels in self.edges.items() if s == src]

    def incoming(self, dst: int) -> list[tuple[int, set[str]]]:
        return [(src, labels) for (src, d), labels in self.edges.items() if d == dst]

    def successors(self) -> dict[int, list[int]]:
        table: dict[int, list[int]] = {}
        for src, dst in self.edges:
            table.setdefault(src, []).append(dst)
        return table

    def predecessors(self) -> dict[int, list[int]]:
        table: dict[int, list[int]] = {}
        for src, dst in self.edges:
            table.setdefault(dst, []).append(src)
        return table


class Environment:
    """Chain of name -> definition-id frames, innermost first."""

    def __init__(self, frames: list[dict[str, list[int]]] | None = None):
        self.frames = frames if frames is not None else [{}]

    def lookup(self, name: str) -> list[int]:
        for frame in self.frames:
            if name in frame:
                return frame[name]
        return []

    def define(self, name: str, def_id: int) -> None:
        self.frames[0][name] = [def_id]

    def define_super(self, name: str, def_id: int) -> None:
        for frame in self.frames[1:]:
            if name in frame:
                frame[name] = [def_id]
                return
        self.frames[-1][name] = [def_id]

    def child(self) -> "Environment":
        return Environment([{}] + self.frames)

    def fork(self) -> "Environment":
        return Environment([{name: list(ids) for name, ids in frame.items()} for frame in self.frames])

    def merge_from(self, other: "Environment") -> None:
        assert len(self.frames) == len(other.frames)
        for mine, theirs in zip(self.frames, other.frames):
            for name, ids in theirs.items():
                merged = mine.get(name, [])
                for def_id in ids:
                    if def_id not in merged:
                        merged = merged + [def_id]
                mine[name] = merged

    def snapshot(self) -> tuple:
        return tuple(tuple(sorted((k, tuple(v)) for k, v in frame.items())) for frame in self.frames)


@dataclass
class _FnInfo:
    node: Node
    params: list[Node]
    body: Node
    analyzed: bool = False
    result: int | None = None


class DataflowBuilder:
    def __init__(
        self,
        ast: NormalizedAst,
        registry: BuiltInRegistry,
        source_resolver: Callable[[str], NormalizedAst | None] | None = None,
    ):
        self.ast = ast
        self.registry = registry
        self.source_resolver = source_resolver
        self.graph = DataflowGraph()
        self.functions: dict[int, _FnInfo] = {}
        self.def_sites: dict[int, int] = {}  # definition id -> value/call vertex it binds
        self._analyzing: set[int] = set()
        self._foreign_base = len(ast.nodes)
        self.foreign_nodes: dict[int, Node] = {}

    # -- helpers ---------------------------------------------------------

    def _snapshot(self, env: Environment) -> tuple:
        labels = sum(len(ls) for ls in self.graph.edges.values())
        return (len(self.graph.vertices), len(self.graph.edges), labels, env.snapshot())

    def build(self) -> tuple[DataflowGraph, Environment]:
        env = Environment()
        self.eval_node(self.ast.root, env)
        return self.graph, env

    # -- evaluation -------------------------------------------------------

    def eval_node(self, node: Node, env: Environment) -> int | None:
        kind = node.kind
        if kind in (NodeKind.NUMBER, NodeKind.STRING, NodeKind.LOGICAL, NodeKind.NULL):
            return self.graph.add_vertex(node.id, VertexKind.VALUE, node.lexeme, node.location)
        if kind is NodeKind.SYMBOL:
            return self.eval_use(node, env)
        if kind is NodeKind.EXPRLIST:
            result = None
            for child in node.children:
                result = self.eval_node(child, env)
            return result
        if kind is NodeKind.ASSIGNMENT:
            return self.eval_assignment(node, env)
        if kind in (NodeKind.BINARY, NodeKind.UNARY):
            return self.eval_operator(node, env)
        if kind is NodeKind.INDEX:
            return self.eval_index(node, env)
        if kind is NodeKind.NAMESPACE:
            name = f"{node.children[0].lexeme}::{node.children[1].lexeme}"
            return self.graph.add_vertex(node.id, VertexKind.VALUE, name, node.location)
        if kind is NodeKind.CALL:
            return self.eval_call(node, env)
        if kind is NodeKind.FUNCTION:
            vid = self.graph.add_vertex(node.id, VertexKind.FUNCTION_DEFINITION, "", node.location)
            self.functions[node.id] = _FnInfo(node, node.children[:-1], node.children[-1])
            return vid
        if kind is NodeKind.IF:
            return self.eval_if(node, env)
        if kind is NodeKind.WHILE:
            self.eval_loop(node, env, cond=node.children[0], body=node.children[1])
            return None
        if kind is NodeKind.REPEAT:
            self.eval_loop(node, env, cond=None, body=node.children[0])
            return None
        if kind is NodeKind.FOR:
            return self.eval_for(node, env)
        # Break / Next / Parameter: control-flow only, no dataflow vertex
        return None

    def eval_use(self, node: Node, env: Environment) -> int:
        vid = self.graph.add_vertex(node.id, VertexKind.USE, node.lexeme, node.location)
        defs = env.lookup(node.lexeme)
        for def_id in defs:
            self.graph.add_edge(vid, def_id, "reads")
        if not defs:
            self.graph.unresolved_uses.add(vid)
        else:
            self.graph.unresolved_uses.discard(vid)
        return vid

    def eval_assignment(self, node: Node, env: Environment) -> int | None:
        target, value = node.children
        value_id = self.eval_node(value, env)
        if target.kind is not NodeKind.SYMBOL:
            # non-symbol target (e.g. x$a <- v): evaluate both sides, define nothing
            self.eval_node(target, env)
            call_id = self.graph.add_vertex(node.id, VertexKind.FUNCTION_CALL, node.op or "<-", node.location)
            if value_id is not None:
                self.graph.add_edge(call_id, value_id, "reads", "argument")
            return call_id
        def_id = self.graph.add_vertex(
            target.id, VertexKind.VARIABLE_DEFINITION, target.lexeme, target.location
        )
        call_id = self.graph.add_vertex(node.id, VertexKind.FUNCTION_CALL, node.op or "<-", node.location)
        if value_id is not None:
            self.graph.add_edge(call_id, value_id, "reads", "argument")
        self.graph.add_edge(call_id, def_id, "returns", "argument")
        if value_id is not None:
            self.graph.add_edge(def_id, value_id, "defined-by")
            self.def_sites[def_id] = value_id
        self.graph.add_edge(def_id, call_id, "defined-by")
        if node.op == "<<-":
            env.define_super(target.lexeme, def_id)
        else:
            env.define(target.lexeme, def_id)
        return call_id

    def eval_operator(self, node: Node, env: Environment) -> int:
        call_id = self.graph.add_vertex(node.id, VertexKind.FUNCTION_CALL, node.op or "", node.location)
        for child in node.children:
            child_id = self.eval_node(child, env)
            if child_id is not None:
                self.graph.add_edge(call_id, child_id, "reads", "argument")
        return call_id

    def eval_index(self, node: Node, env: Environment) -> int:
        call_id = self.graph.add_vertex(node.id, VertexKind.FUNCTION_CALL, node.op or "", node.location)
        base_id = self.eval_node(node.children[0], env)
        if base_id is not None:
            self.graph.add_edge(call_id, base_id, "reads", "argument")
        if node.op == "$":
            return call_id  # the field name is not a variable use
        for sub in node.children[1:]:
            sub_id = self.eval_node(sub, env)
            if sub_id is not None:
                self.graph.add_edge(call_id, sub_id, "reads", "argument")
        return call_id

    def eval_if(self, node: Node, env: Environment) -> int:
        cond = node.children[0]
        cond_id = self.eval_node(cond, env)
        call_id = self.graph.add_vertex(node.id, VertexKind.FUNCTION_CALL, "if", node.location)
        if cond_id is not None:
            self.graph.add_edge(call_id, cond_id, "reads", "argument")
        then_env = env.fork()
        then_id = self.eval_node(node.children[1], then_env)
        if then_id is not None:
            self.graph.add_edge(call_id, then_id, "reads", "argument")
        if len(node.children) == 3:
            else_env = env.fork()
            else_id = self.eval_node(node.children[2], else_env)
            if else_id is not None:
                self.graph.add_edge(call_id, else_id, "reads", "argument")
            for frame in env.frames:
                frame.clear()
            env.merge_from(then_env)
            env.merge_from(else_env)
        else:
            env.merge_from(then_env)
        return call_id

    def eval_loop(self, node: Node, env: Environment, cond: Node | None, body: Node) -> None:
        cap = max(2, len(self.ast.nodes))
        for _ in range(cap):
            before = self._snapshot(env)
            if cond is not None:
                self.eval_node(cond, env)
            body_env = env.fork()
            self.eval_node(body, body_env)
            env.merge_from(body_env)
            if self._snapshot(env) == before:
                break

    def eval_for(self, node: Node, env: Environment) -> None:
        var, seq, body = node.children
        seq_id = self.eval_node(seq, env)
        def_id = self.graph.add_vertex(var.id, VertexKind.VARIABLE_DEFINITION, var.lexeme, var.location)
        if seq_id is not None:
            self.graph.add_edge(def_id, seq_id, "defined-by")
            self.def_sites[def_id] = seq_id
        env.define(var.lexeme, def_id)
        cap = max(2, len(self.ast.nodes))
        for _ in range(cap):
            before = self._snapshot(env)
            body_env = env.fork()
            self.eval_node(body, body_env)
            env.merge_from(body_env)
            if self._snapshot(env) == before:
                break

    # -- calls -------------------------------------------------------------

    def eval_call(self, node: Node, env: Environment) -> int:
        callee, *args = node.children
        name = node.lexeme
        semantics = self.registry.lookup(name) if name else None

        if semantics is not None and semantics.tag == "library-load" and args:
            return self.eval_library_call(node, args, env)
        if name == "source" and self.source_resolver is not None:
            inlined = self.try_inline_source(node, args, env)
            if inlined is not None:
                return inlined

        arg_ids: list[int] = []
        for arg in args:
            value = arg.children[0] if arg.kind is NodeKind.ARGUMENT else arg
            arg_ids.append(self.eval_node(value, env))

        call_id = self.graph.add_vertex(node.id, VertexKind.FUNCTION_CALL, name, node.location)
        for arg_id in arg_ids:
            if arg_id is not None:
                self.graph.add_edge(call_id, arg_id, "reads", "argument")

        if callee.kind is NodeKind.FUNCTION:
            fn_id = self.eval_node(callee, env)
            self.link_call(call_id, fn_id, args, env)
        elif callee.kind is NodeKind.SYMBOL:
            defs = env.lookup(name)
            fn_targets = []
            for def_id in defs:
                self.graph.add_edge(call_id, def_id, "reads")
                bound = self.def_sites.get(def_id)
                if bound is not None and bound in self.functions:
                    fn_targets.append(bound)
            for fn_id in fn_targets:
                self.link_call(call_id, fn_id, args, env)
            if not defs and (semantics is None or semantics.tag == "pure-unknown"):
                self.graph.unresolved_calls.add(call_id)
        elif callee.kind is NodeKind.NAMESPACE:
            pass  # package function; the namespace itself is not a variable use
        else:
            callee_id = self.eval_node(callee, env)
            if callee_id is not None:
                self.graph.add_edge(call_id, callee_id, "reads")
        return call_id

    def eval_library_call(self, node: Node, args: list[Node], env: Environment) -> int:
        call_id = self.graph.add_vertex(node.id, VertexKind.FUNCTION_CALL, node.lexeme, node.location)
        for arg in args:
            value = arg.children[0] if arg.kind is NodeKind.ARGUMENT else arg
            if value.kind is NodeKind.SYMBOL:
                # library(pkg): non-standard evaluation, pkg is a name not a use
                vid = self.graph.add_vertex(value.id, VertexKind.VALUE, value.lexeme, value.location)
            else:
                vid = self.eval_node(value, env)
            if vid is not None:
                self.graph.add_edge(call_id, vid, "reads", "argument")
        return call_id

    def try_inline_source(self, node: Node, args: list[Node], env: Environment) -> int | None:
        if not args:
            return None
        value = args[0].children[0] if args[0].kind is NodeKind.ARGUMENT else args[0]
        if value.kind is not NodeKind.STRING:
            return None
        from rslice.syntax.tokens import string_value

        target = self.source_resolver(string_value(value.lexeme))
        if target is None:
            return None
        shifted = _shift_ids(target.root, self._foreign_base)
        self._foreign_base += len(target.nodes)
        for foreign in shifted.walk():
            self.foreign_nodes[foreign.id] = foreign
        path_id = self.graph.add_vertex(value.id, VertexKind.VALUE, value.lexeme, value.location)
        call_id = self.graph.add_vertex(node.id, VertexKind.FUNCTION_CALL, "source", node.location)
        self.graph.add_edge(call_id, path_id, "reads", "argument")
        self.eval_node(shifted, env)
        return call_id

    def link_call(self, call_id: int, fn_id: int, args: list[Node], env: Environment) -> None:
        info = self.functions.get(fn_id)
        if info is None:
            return
        self.graph.add_edge(call_id, fn_id, "calls")
        if not info.analyzed and fn_id not in self._analyzing:
            self._analyzing.add(fn_id)
            fn_env = env.child()
            for param in info.params:
                param_def = self.graph.add_vertex(
                    param.id, VertexKind.VARIABLE_DEFINITION, param.name or param.lexeme, param.location
                )
                if param.children:
                    default_id = self.eval_node(param.children[0], fn_env)
                    if default_id is not None:
                        self.graph.add_edge(param_def, default_id, "defined-by")
                fn_env.define(param.name or param.lexeme, param.id)
            info.result = self.eval_node(info.body, fn_env)
            info.analyzed = True
            self._analyzing.discard(fn_id)
        if info.result is not None:
            self.graph.add_edge(call_id, info.result, "returns")
        self.bind_arguments(info, args)

    def bind_arguments(self, info: _FnInfo, args: list[Node]) -> None:
        by_name = {p.name or p.lexeme: p for p in info.params}
        positional = list(info.params)
        matched: dict[int, Node] = {}
        leftovers: list[Node] = []
        for arg in args:
            if arg.kind is NodeKind.ARGUMENT and arg.name and arg.name in by_name:
                matched[by_name[arg.name].id] = arg.children[0]
                positional = [p for p in positional if (p.name or p.lexeme) != arg.name]
            else:
                leftovers.append(arg)
        for param, arg in zip(positional, leftovers):
            value = arg.children[0] if arg.kind is NodeKind.ARGUMENT else arg
            matched[param.id] = value
        for param_id, value in matched.items():
            if param_id in self.graph.vertices and value.id in self.graph.vertices:
                self.graph.add_edge(param_id, value.id, "defined-by-on-call")


def _shift_ids(root: Node, offset: int) -> Node:
    def clone(node: Node) -> Node:
        copy = Node(
            node.kind, node.lexeme, node.location,
            [clone(c) for c in node.children],
            op=node.op, name=node.name, braced=node.braced,
        )
        copy.id = node.id + offset
        return copy

    return clone(root)


def build_dataflow(
    ast: NormalizedAst,
    registry: BuiltInRegistry | None = None,
    source_resolver: Callable[[str], NormalizedAst | None] | None = None,
) -> tuple[DataflowGraph, Environment]:
    """Build the dataflow graph of `ast` and return it with the exit environment."""
    builder = DataflowBuilder(ast, registry or BuiltInRegistry(), source_resolver)
    return builder.build()


def resolve_call_targets(graph: DataflowGraph, call: int) -> set[int]:
    """Function-definition vertices a call may dispatch to (may be empty)."""
    vertex = graph.vertices.get(call)
    if vertex is None or vertex.kind is not VertexKind.FUNCTION_CALL:
        raise ValueError(f"node {call} is not a function-call vertex")
    targets: set[int] = set()
    for dst, labels in graph.outgoing(call):
        if "calls" in labels:
            targets.add(dst)
        if "reads" in labels:
            candidate = graph.vertices[dst]
            if candidate.kind is VertexKind.VARIABLE_DEFINITION:
                for dst2, labels2 in graph.outgoing(dst):
                    if "defined-by" in labels2 and (
                        graph.vertices[dst2].kind is VertexKind.FUNCTION_DEFINITION
                    ):
                        targets.add(dst2)
    return targets


def render_ascii(graph: DataflowGraph) -> str:
    """Plain-text listing: vertices by id, then one line per edge in
    construction order, labels in the fixed order reads, returns, defined-by,
    defined-by-on-call, calls, argument."""
    lines = []
    for vid in sorted(graph.vertices):
        vertex = graph.vertices[vid]
        name = f" {vertex.name}" if vertex.name else ""
        lines.append(f"{vid} {vertex.kind.value}{name}")
    for (src, dst), labels in graph.edges.items():
        ordered = [label for label in LABEL_ORDER if label in labels]
        lines.append(f"{src} -> {dst}: {', '.join(ordered)}")
    unresolved = sorted({graph.vertices[v].name for v in graph.unresolved_uses})
    if unresolved:
        lines.append(f"unresolved: {', '.join(unresolved)}")
    return "\n".join(lines)


def render_mermaid(graph: DataflowGraph) -> str:
    """Flowchart-dialect diagram text for the UI and manual inspection."""
    lines = ["flowchart TD"]
    for vid in sorted(graph.vertices):
        vertex = graph.vertices[vid]
        name = f": {vertex.name}" if vertex.name else ""
        lines.append(f'    n{vid}["{vid} {vertex.kind.value}{name}"]')
    for (src, dst), labels in graph.edges.items():
        ordered = [label for label in LABEL_ORDER if label in labels]
        lines.append(f"    n{src} -->|{', '.join(ordered)}| n{dst}")
    return "\n".join(lines)
