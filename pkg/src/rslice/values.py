"""Abstract values (intervals, string sets, logical sets) and data-frame shapes.

Feeds hover output, dead-code detection, and column-access linting. All
operations are total: anything outside the lattice's reach degrades to Top.
"""
from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from typing import Callable

from rslice.dataflow import DataflowGraph, VertexKind
from rslice.syntax.ast import NodeKind, NormalizedAst
from rslice.syntax.tokens import string_value

INF = math.inf


class Top:
    def __repr__(self) -> str:
        return "⊤"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Top)

    def __hash__(self) -> int:
        return hash("⊤")


class Bottom:
    def __repr__(self) -> str:
        return "⊥"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Bottom)

    def __hash__(self) -> int:
        return hash("⊥")


TOP = Top()
BOTTOM = Bottom()


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    integral: bool = False

    def __post_init__(self) -> None:
        assert self.lo <= self.hi

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def is_point(self) -> bool:
        return self.lo == self.hi


@dataclass(frozen=True)
class StringSet:
    values: frozenset[str] | None = None  # None means "any string"

    @property
    def any(self) -> bool:
        return self.values is None


@dataclass(frozen=True)
class LogicalSet:
    values: frozenset[bool]


AbstractValue = object  # Top | Bottom | Interval | StringSet | LogicalSet


def interval(lo: float, hi: float | None = None, integral: bool = False) -> Interval:
    return Interval(lo, hi if hi is not None else lo, integral)


def strings(*values: str) -> StringSet:
    return StringSet(frozenset(values))


def logical(*values: bool) -> LogicalSet:
    return LogicalSet(frozenset(values))


def join(a: AbstractValue, b: AbstractValue) -> AbstractValue:
    if a == BOTTOM:
        return b
    if b == BOTTOM:
        return a
    if a == TOP or b == TOP:
        return TOP
    if isinstance(a, Interval) and isinstance(b, Interval):
        return Interval(min(a.lo, b.lo), max(a.hi, b.hi), a.integral and b.integral)
    if isinstance(a, StringSet) and isinstance(b, StringSet):
        if a.any or b.any:
            return StringSet(None)
        return StringSet(a.values | b.values)
    if isinstance(a, LogicalSet) and isinstance(b, LogicalSet):
        return LogicalSet(a.values | b.values)
    return TOP


def widen(old: AbstractValue, new: AbstractValue) -> AbstractValue:
    """Force convergence: bounds that grew jump to ±∞, large sets collapse."""
    if old == BOTTOM:
        return new
    if new == BOTTOM:
        return old
    if isinstance(old, Interval) and isinstance(new, Interval):
        lo = old.lo if new.lo >= old.lo else -INF
        hi = old.hi if new.hi <= old.hi else INF
        return Interval(lo, hi, old.integral and new.integral)
    if isinstance(old, StringSet) and isinstance(new, StringSet):
        joined = join(old, new)
        if isinstance(joined, StringSet) and not joined.any and len(joined.values) > 8:
            return StringSet(None)
        return joined
    if isinstance(old, LogicalSet) and isinstance(new, LogicalSet):
        return join(old, new)
    return join(old, new)


# -- interval arithmetic ----------------------------------------------------


def _mul(x: float, y: float) -> float:
    if x == 0 or y == 0:
        return 0.0
    return x * y


def arith(op: str, a: AbstractValue, b: AbstractValue) -> AbstractValue:
    if a == BOTTOM or b == BOTTOM:
        return BOTTOM
    if not isinstance(a, Interval) or not isinstance(b, Interval):
        return TOP
    integral = a.integral and b.integral
    if op == "+":
        return Interval(a.lo + b.lo, a.hi + b.hi, integral)
    if op == "-":
        return Interval(a.lo - b.hi, a.hi - b.lo, integral)
    if op == "*":
        products = [_mul(a.lo, b.lo), _mul(a.lo, b.hi), _mul(a.hi, b.lo), _mul(a.hi, b.hi)]
        return Interval(min(products), max(products), integral)
    if op == "/":
        if b.lo <= 0 <= b.hi:
            return Interval(-INF, INF)
        quotients = [a.lo / b.lo, a.lo / b.hi, a.hi / b.lo, a.hi / b.hi]
        return Interval(min(quotients), max(quotients))
    if op == "^":
        return _power(a, b)
    if op == ":":
        return Interval(min(a.lo, b.lo), max(a.hi, b.hi), integral)
    return TOP


def _power(a: Interval, b: Interval) -> AbstractValue:
    if b.is_point() and b.lo == int(b.lo) and b.lo >= 0:
        n = int(b.lo)
        candidates = [a.lo**n, a.hi**n]
        if a.lo < 0 < a.hi and n % 2 == 0:
            candidates.append(0.0)
        return Interval(min(candidates), max(candidates), a.integral and b.integral)
    if a.lo > 0:
        return Interval(0, INF)
    return Interval(-INF, INF)


def compare(op: str, a: AbstractValue, b: AbstractValue) -> AbstractValue:
    if a == BOTTOM or b == BOTTOM:
        return BOTTOM
    if isinstance(a, StringSet) and isinstance(b, StringSet) and op in ("==", "!="):
        if not a.any and not b.any and len(a.values) == 1 and len(b.values) == 1:
            equal = a.values == b.values
            return logical(equal if op == "==" else not equal)
        return logical(True, False)
    if not isinstance(a, Interval) or not isinstance(b, Interval):
        return TOP if a == TOP or b == TOP else logical(True, False)
    checks: dict[str, tuple[bool, bool]] = {
        "<": (a.hi < b.lo, a.lo >= b.hi),
        "<=": (a.hi <= b.lo, a.lo > b.hi),
        ">": (a.lo > b.hi, a.hi <= b.lo),
        ">=": (a.lo >= b.hi, a.hi < b.lo),
        "==": (a.is_point() and b.is_point() and a.lo == b.lo, a.hi < b.lo or b.hi < a.lo),
        "!=": (a.hi < b.lo or b.hi < a.lo, a.is_point() and b.is_point() and a.lo == b.lo),
    }
    definitely_true, definitely_false = checks[op]
    if definitely_true:
        return logical(True)
    if definitely_false:
        return logical(False)
    return logical(True, False)


def logic(op: str, a: AbstractValue, b: AbstractValue) -> AbstractValue:
    if not isinstance(a, LogicalSet) or not isinstance(b, LogicalSet):
        return TOP
    table = {"&": lambda x, y: x and y, "&&": lambda x, y: x and y,
             "|": lambda x, y: x or y, "||": lambda x, y: x or y}
    fn = table.get(op)
    if fn is None:
        return TOP
    return LogicalSet(frozenset(fn(x, y) for x in a.values for y in b.values))


# -- rendering ---------------------------------------------------------------


def _bound(x: float, integral: bool) -> str:
    if x == INF:
        return "Inf"
    if x == -INF:
        return "-Inf"
    if integral and x == int(x):
        return f"{int(x)}L"
    return f"{x:g}"


def render_value(value: AbstractValue) -> str:
    if value == TOP:
        return "⊤"
    if value == BOTTOM:
        return "⊥"
    if isinstance(value, Interval):
        return f"[{_bound(value.lo, value.integral)}, {_bound(value.hi, value.integral)}]"
    if isinstance(value, StringSet):
        if value.any:
            return "any string"
        return ", ".join(f'"{s}"' for s in sorted(value.values))
    if isinstance(value, LogicalSet):
        return ", ".join("TRUE" if v else "FALSE" for v in sorted(value.values, reverse=True))
    return "⊤"


# -- value resolution over the dataflow graph --------------------------------


class ValueResolver:
    """Abstract evaluation with per-round memoization and loop widening."""

    def __init__(self, ast: NormalizedAst, graph: DataflowGraph, fuel: int = 2):
        self.ast = ast
        self.graph = graph
        self.fuel = fuel
        self._nodes = dict(ast.nodes)

    def node(self, node_id: int):
        return self._nodes.get(node_id)

    def add_foreign_nodes(self, nodes: dict) -> None:
        self._nodes.update(nodes)

    def value_of(self, node_id: int) -> AbstractValue:
        assumed: dict[int, AbstractValue] = {}
        result: AbstractValue = TOP
        for _ in range(self.fuel + 2):
            self._round: dict[int, AbstractValue] = {}
            self._stack: set[int] = set()
            self._cycles: set[int] = set()
            self._assumed = assumed
            result = self._eval(node_id)
            if not self._cycles:
                return result
            new_assumed = {
                n: widen(assumed.get(n, BOTTOM), self._round.get(n, BOTTOM))
                for n in self._cycles | set(assumed)
            }
            if new_assumed == assumed:
                return result
            assumed = new_assumed
        return result

    def _eval(self, node_id: int) -> AbstractValue:
        if node_id in self._round:
            return self._round[node_id]
        if node_id in self._stack:
            self._cycles.add(node_id)
            return self._assumed.get(node_id, BOTTOM)
        self._stack.add(node_id)
        try:
            value = self._eval_inner(node_id)
        finally:
            self._stack.discard(node_id)
        self._round[node_id] = value
        return value

    def _eval_inner(self, node_id: int) -> AbstractValue:
        node = self.node(node_id)
        if node is None:
            return TOP
        kind = node.kind
        if kind is NodeKind.NUMBER:
            return literal_number(node.lexeme)
        if kind is NodeKind.STRING:
            return strings(string_value(node.lexeme))
        if kind is NodeKind.LOGICAL:
            return logical(node.lexeme == "TRUE")
        if kind is NodeKind.NULL:
            return TOP
        if kind is NodeKind.SYMBOL:
            return self._eval_symbol(node_id)
        if kind is NodeKind.PARAMETER:
            return self._eval_definition(node_id)
        if kind is NodeKind.ASSIGNMENT:
            return self._eval(node.children[1].id)
        if kind is NodeKind.BINARY:
            left = self._eval(node.children[0].id)
            right = self._eval(node.children[1].id)
            op = node.op or ""
            if op in ("+", "-", "*", "/", "^", ":"):
                return arith(op, left, right)
            if op in ("<", "<=", ">", ">=", "==", "!="):
                return compare(op, left, right)
            if op in ("&", "&&", "|", "||"):
                return logic(op, left, right)
            return TOP
        if kind is NodeKind.UNARY:
            operand = self._eval(node.children[0].id)
            if node.op == "-" and isinstance(operand, Interval):
                return Interval(-operand.hi, -operand.lo, operand.integral)
            if node.op == "!" and isinstance(operand, LogicalSet):
                return LogicalSet(frozenset(not v for v in operand.values))
            return TOP if operand == TOP else TOP
        if kind is NodeKind.IF:
            branches = node.children[1:]
            value: AbstractValue = BOTTOM
            for branch in branches:
                value = join(value, self._eval(branch.id))
            if len(branches) == 1:
                value = TOP if value == BOTTOM else value
            return value
        if kind is NodeKind.EXPRLIST:
            if not node.children:
                return TOP
            return self._eval(node.children[-1].id)
        if kind is NodeKind.CALL:
            return self._eval_call(node_id)
        return TOP

    def _eval_symbol(self, node_id: int) -> AbstractValue:
        vertex = self.graph.vertices.get(node_id)
        if vertex is None:
            return TOP
        if vertex.kind is VertexKind.USE:
            defs = [dst for dst, labels in self.graph.outgoing(node_id) if "reads" in labels]
            if not defs:
                return TOP
            value: AbstractValue = BOTTOM
            for def_id in defs:
                value = join(value, self._eval(def_id))
            return value
        if vertex.kind is VertexKind.VARIABLE_DEFINITION:
            return self._eval_definition(node_id)
        return TOP

    def _eval_definition(self, def_id: int) -> AbstractValue:
        returners = {
            src
            for src, labels in self.graph.incoming(def_id)
            if "returns" in labels
        }
        bound: AbstractValue = BOTTOM
        for dst, labels in self.graph.outgoing(def_id):
            if "defined-by" in labels and dst not in returners:
                bound = join(bound, self._eval(dst))
            if "defined-by-on-call" in labels:
                bound = join(bound, self._eval(dst))
        return TOP if bound == BOTTOM else bound

    def _eval_call(self, node_id: int) -> AbstractValue:
        node = self.node(node_id)
        if node.lexeme == "c":
            value: AbstractValue = BOTTOM
            for arg in node.children[1:]:
                child = arg.children[0] if arg.kind is NodeKind.ARGUMENT else arg
                value = join(value, self._eval(child.id))
            return TOP if value == BOTTOM else value
        for dst, labels in self.graph.outgoing(node_id):
            if "returns" in labels and self.graph.vertices[dst].kind is not VertexKind.VARIABLE_DEFINITION:
                return self._eval(dst)
        return TOP


def literal_number(lexeme: str) -> Interval:
    text = lexeme
    integral = False
    if text.endswith("L"):
        text = text[:-1]
        integral = True
    elif "." not in text and "e" not in text and "E" not in text:
        integral = True
    value = float(text)
    return Interval(value, value, integral)


def resolve_value(ast: NormalizedAst, graph: DataflowGraph, node_id: int, fuel: int = 2) -> AbstractValue:
    """Abstract value of a node; Top when nothing better is known."""
    return ValueResolver(ast, graph, fuel).value_of(node_id)


# -- data-frame shapes --------------------------------------------------------


@dataclass(frozen=True)
class DataFrameShape:
    columns: tuple[str, ...] = ()
    open: bool = True  # True: possibly more columns than listed
    rows: Interval | None = None  # None: unknown row count

    def with_rows(self, rows: Interval | None) -> "DataFrameShape":
        return DataFrameShape(self.columns, self.open, rows)


UNKNOWN_SHAPE = DataFrameShape()


def render_shape(shape: DataFrameShape) -> str:
    parts = ["a data frame"]
    if shape.rows is not None:
        if shape.rows.is_point():
            parts.append(f"with {int(shape.rows.lo)} rows")
        else:
            hi = "Inf" if shape.rows.hi == INF else str(int(shape.rows.hi))
            parts.append(f"with between {int(shape.rows.lo)} and {hi} rows")
    if not shape.open and shape.columns:
        joiner = "and " if len(parts) > 1 else "with "
        parts.append(f"{joiner}known columns: {', '.join(shape.columns)}")
    return f"{parts[0]} {', '.join(parts[1:])}".rstrip() if len(parts) > 1 else parts[0]


class ShapeInference:
    """Data-frame shape inference through a transformer registry."""

    def __init__(
        self,
        ast: NormalizedAst,
        graph: DataflowGraph,
        resolver: ValueResolver | None = None,
        root_dir: str | None = None,
        transformers: dict[str, Callable] | None = None,
    ):
        self.ast = ast
        self.graph = graph
        self.resolver = resolver or ValueResolver(ast, graph)
        self.root_dir = root_dir
        self.transformers = transformers if transformers is not None else default_transformers()
        self._memo: dict[int, DataFrameShape] = {}
        self._stack: set[int] = set()

    def node(self, node_id: int):
        return self.resolver.node(node_id)

    def shape_of(self, node_id: int) -> DataFrameShape:
        if node_id in self._memo:
            return self._memo[node_id]
        if node_id in self._stack:
            return UNKNOWN_SHAPE
        self._stack.add(node_id)
        try:
            shape = self._infer(node_id)
        finally:
            self._stack.discard(node_id)
        self._memo[node_id] = shape
        return shape

    def _infer(self, node_id: int) -> DataFrameShape:
        node = self.node(node_id)
        if node is None:
            return UNKNOWN_SHAPE
        kind = node.kind
        if kind is NodeKind.SYMBOL:
            vertex = self.graph.vertices.get(node_id)
            if vertex is None:
                return UNKNOWN_SHAPE
            if vertex.kind is VertexKind.USE:
                defs = [dst for dst, labels in self.graph.outgoing(node_id) if "reads" in labels]
                return self._merge_all(defs)
            if vertex.kind is VertexKind.VARIABLE_DEFINITION:
                returners = {src for src, labels in self.graph.incoming(node_id) if "returns" in labels}
                sources = [
                    dst
                    for dst, labels in self.graph.outgoing(node_id)
                    if ("defined-by" in labels and dst not in returners) or "defined-by-on-call" in labels
                ]
                return self._merge_all(sources)
            return UNKNOWN_SHAPE
        if kind is NodeKind.ASSIGNMENT:
            return self.shape_of(node.children[1].id)
        if kind is NodeKind.CALL:
            rule = self.transformers.get(node.lexeme)
            if rule is not None:
                return rule(self, node)
            return UNKNOWN_SHAPE
        return UNKNOWN_SHAPE

    def _merge_all(self, node_ids: list[int]) -> DataFrameShape:
        shapes = [self.shape_of(n) for n in node_ids]
        shapes = [s for s in shapes if s is not None]
        if not shapes:
            return UNKNOWN_SHAPE
        merged = shapes[0]
        for shape in shapes[1:]:
            columns = list(merged.columns) + [c for c in shape.columns if c not in merged.columns]
            rows = None
            if merged.rows is not None and shape.rows is not None:
                rows = join(merged.rows, shape.rows)
            merged = DataFrameShape(tuple(columns), merged.open or shape.open, rows)
        return merged

    # -- helpers used by transformer rules --------------------------------

    def call_args(self, node) -> list:
        return node.children[1:]

    def arg_value_node(self, arg):
        return arg.children[0] if arg.kind is NodeKind.ARGUMENT else arg

    def literal_length(self, value_node) -> int | None:
        if value_node.kind in (NodeKind.NUMBER, NodeKind.STRING, NodeKind.LOGICAL):
            return 1
        if value_node.kind is NodeKind.CALL and value_node.lexeme == "c":
            return len(value_node.children) - 1
        if value_node.kind is NodeKind.BINARY and value_node.op == ":":
            bounds = self.resolver.value_of(value_node.id)
            if isinstance(bounds, Interval) and bounds.lo != -INF and bounds.hi != INF:
                return int(bounds.hi - bounds.lo) + 1
        return None

    def key_names(self, arg) -> list[str]:
        value = self.arg_value_node(arg)
        if value.kind is NodeKind.STRING:
            return [string_value(value.lexeme)]
        resolved = self.resolver.value_of(value.id)
        if isinstance(resolved, StringSet) and not resolved.any:
            return sorted(resolved.values)
        if value.kind is NodeKind.CALL and value.lexeme == "c":
            names = []
            for child in value.children[1:]:
                names.extend(self.key_names(child))
            return names
        return []


def default_transformers() -> dict[str, Callable]:
    return {
        "data.frame": _shape_data_frame,
        "read.csv": _shape_read_csv,
        "mutate": _shape_mutate,
        "select": _shape_select,
        "filter": _shape_filter,
        "left_join": _shape_left_join,
    }


def _shape_data_frame(inf: ShapeInference, node) -> DataFrameShape:
    columns = []
    lengths: set[int] = set()
    unknown_length = False
    for arg in inf.call_args(node):
        if arg.kind is not NodeKind.ARGUMENT or not arg.name:
            return UNKNOWN_SHAPE
        columns.append(arg.name)
        length = inf.literal_length(inf.arg_value_node(arg))
        if length is None:
            unknown_length = True
        else:
            lengths.add(length)
    rows: Interval | None = None
    if not unknown_length:
        non_scalar = lengths - {1}
        if not non_scalar:
            rows = interval(1, integral=True) if lengths else interval(0, integral=True)
        elif len(non_scalar) == 1:
            n = non_scalar.pop()
            rows = interval(n, integral=True)
    return DataFrameShape(tuple(columns), open=False, rows=rows)


def _shape_read_csv(inf: ShapeInference, node) -> DataFrameShape:
    args = inf.call_args(node)
    if not args:
        return UNKNOWN_SHAPE
    value = inf.resolver.value_of(inf.arg_value_node(args[0]).id)
    if not isinstance(value, StringSet) or value.any or len(value.values) != 1:
        return UNKNOWN_SHAPE
    path = next(iter(value.values))
    if not os.path.isabs(path) and inf.root_dir:
        path = os.path.join(inf.root_dir, path)
    if not os.path.isfile(path):
        return UNKNOWN_SHAPE
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            reader = csv.reader(handle)
            header = next(reader, [])
            count = sum(1 for _ in reader)
    except OSError:
        return UNKNOWN_SHAPE
    return DataFrameShape(tuple(header), open=False, rows=interval(count, integral=True))


def _input_shape(inf: ShapeInference, node) -> DataFrameShape:
    args = inf.call_args(node)
    if not args:
        return UNKNOWN_SHAPE
    return inf.shape_of(inf.arg_value_node(args[0]).id)


def _shape_mutate(inf: ShapeInference, node) -> DataFrameShape:
    shape = _input_shape(inf, node)
    columns = list(shape.columns)
    for arg in inf.call_args(node)[1:]:
        if arg.kind is NodeKind.ARGUMENT and arg.name and arg.name not in columns:
            columns.append(arg.name)
    return DataFrameShape(tuple(columns), shape.open, shape.rows)


def _shape_select(inf: ShapeInference, node) -> DataFrameShape:
    shape = _input_shape(inf, node)
    args = inf.call_args(node)[1:]
    dropped: list[str] = []
    kept: list[str] = []
    for arg in args:
        value = inf.arg_value_node(arg)
        if value.kind is NodeKind.UNARY and value.op == "-" and value.children[0].kind is NodeKind.SYMBOL:
            dropped.append(value.children[0].lexeme)
        elif value.kind is NodeKind.SYMBOL:
            kept.append(value.lexeme)
    if dropped and not kept:
        columns = tuple(c for c in shape.columns if c not in dropped)
        return DataFrameShape(columns, shape.open, shape.rows)
    if kept:
        return DataFrameShape(tuple(kept), open=False, rows=shape.rows)
    return shape


def _shape_filter(inf: ShapeInference, node) -> DataFrameShape:
    shape = _input_shape(inf, node)
    rows = None
    if shape.rows is not None:
        rows = Interval(0, shape.rows.hi, shape.rows.integral)
    return DataFrameShape(shape.columns, shape.open, rows)


def _shape_left_join(inf: ShapeInference, node) -> DataFrameShape:
    args = inf.call_args(node)
    left = _input_shape(inf, node)
    if len(args) < 2:
        return UNKNOWN_SHAPE
    right = inf.shape_of(inf.arg_value_node(args[1]).id)
    keys: list[str] = []
    for arg in args[2:]:
        if arg.kind is NodeKind.ARGUMENT and arg.name == "by":
            keys = inf.key_names(arg)
    key_set = set(keys)
    columns = [c for c in left.columns if c not in key_set]
    columns += [k for k in keys if k in left.columns or k in right.columns]
    columns += [c for c in right.columns if c not in key_set and c not in columns]
    # keys assumed unique on the right: the left operand's row count survives
    return DataFrameShape(tuple(columns), left.open or right.open, left.rows)


def infer_df_shape(
    ast: NormalizedAst,
    graph: DataflowGraph,
    node_id: int,
    transformers: dict[str, Callable] | None = None,
    root_dir: str | None = None,
) -> DataFrameShape:
    """Shape of the data frame flowing out of `node_id` (open/unknown if none)."""
    inference = ShapeInference(ast, graph, root_dir=root_dir, transformers=transformers)
    return inference.shape_of(node_id)
