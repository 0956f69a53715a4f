"""Compact control-flow graph over basic blocks with ⊤/⊥ branch edges."""
from __future__ import annotations

from dataclasses import dataclass, field

from rslice.syntax.ast import Node, NodeKind, NormalizedAst

FALLTHROUGH = "fallthrough"
TRUE = "true"
FALSE = "false"
LOOP_BACK = "loop-back"

_EDGE_GLYPH = {TRUE: "⊤", FALSE: "⊥", LOOP_BACK: "loop", FALLTHROUGH: ""}


@dataclass
class Cfg:
    blocks: dict[int, list[int]] = field(default_factory=dict)
    edges: set[tuple[int, int, str]] = field(default_factory=set)
    entry: int = 0
    exit: int = 1
    # condition block -> the condition's NodeId (the For node for has-next tests)
    conditions: dict[int, int] = field(default_factory=dict)

    def successors(self, block: int) -> list[tuple[int, str]]:
        return sorted((dst, label) for src, dst, label in self.edges if src == block)

    def predecessors(self, block: int) -> list[tuple[int, str]]:
        return sorted((src, label) for src, dst, label in self.edges if dst == block)

    def reachable(self) -> set[int]:
        seen = {self.entry}
        work = [self.entry]
        while work:
            block = work.pop()
            for dst, _ in self.successors(block):
                if dst not in seen:
                    seen.add(dst)
                    work.append(dst)
        return seen

    def block_of(self, node_id: int) -> int | None:
        for block, nodes in self.blocks.items():
            if node_id in nodes:
                return block
        return None


class _CfgBuilder:
    def __init__(self) -> None:
        self.cfg = Cfg()
        self.cfg.blocks[0] = []
        self.cfg.blocks[1] = []
        self.next_id = 2
        # innermost-first stack of (condition block, after block)
        self.loops: list[tuple[int, int]] = []

    def new_block(self) -> int:
        block = self.next_id
        self.next_id += 1
        self.cfg.blocks[block] = []
        return block

    def edge(self, src: int, dst: int, label: str = FALLTHROUGH) -> None:
        self.cfg.edges.add((src, dst, label))

    def statements(self, node: Node, current: int) -> int:
        """Lay out the statements of an expression list; returns the open block."""
        for child in node.children:
            current = self.statement(child, current)
        return current

    def statement(self, node: Node, current: int) -> int:
        kind = node.kind
        if kind is NodeKind.EXPRLIST:
            return self.statements(node, current)
        if kind is NodeKind.IF:
            return self.build_if(node, current)
        if kind is NodeKind.WHILE:
            return self.build_while(node, current)
        if kind is NodeKind.FOR:
            return self.build_for(node, current)
        if kind is NodeKind.REPEAT:
            return self.build_repeat(node, current)
        if kind is NodeKind.BREAK:
            self.cfg.blocks[current].append(node.id)
            if self.loops:
                self.edge(current, self.loops[-1][1])
            return self.new_block()
        if kind is NodeKind.NEXT:
            self.cfg.blocks[current].append(node.id)
            if self.loops:
                self.edge(current, self.loops[-1][0], LOOP_BACK)
            return self.new_block()
        self.cfg.blocks[current].append(node.id)
        return current

    def build_if(self, node: Node, current: int) -> int:
        cond = node.children[0]
        cond_block = self.new_block()
        self.cfg.blocks[cond_block].append(cond.id)
        self.cfg.conditions[cond_block] = cond.id
        self.edge(current, cond_block)
        join = self.new_block()
        then_block = self.new_block()
        self.edge(cond_block, then_block, TRUE)
        then_end = self.statement(node.children[1], then_block)
        self.edge(then_end, join)
        if len(node.children) == 3:
            else_block = self.new_block()
            self.edge(cond_block, else_block, FALSE)
            else_end = self.statement(node.children[2], else_block)
            self.edge(else_end, join)
        else:
            self.edge(cond_block, join, FALSE)
        return join

    def build_while(self, node: Node, current: int) -> int:
        cond, body = node.children
        cond_block = self.new_block()
        self.cfg.blocks[cond_block].append(cond.id)
        self.cfg.conditions[cond_block] = cond.id
        self.edge(current, cond_block)
        after = self.new_block()
        body_block = self.new_block()
        self.edge(cond_block, body_block, TRUE)
        self.loops.append((cond_block, after))
        body_end = self.statement(body, body_block)
        self.loops.pop()
        self.edge(body_end, cond_block, LOOP_BACK)
        self.edge(cond_block, after, FALSE)
        return after

    def build_for(self, node: Node, current: int) -> int:
        var, seq, body = node.children
        self.cfg.blocks[current].append(seq.id)
        cond_block = self.new_block()  # has-next test, owned by the For node
        self.cfg.blocks[cond_block].append(node.id)
        self.cfg.conditions[cond_block] = node.id
        self.edge(current, cond_block)
        after = self.new_block()
        body_block = self.new_block()
        self.cfg.blocks[body_block].append(var.id)
        self.edge(cond_block, body_block, TRUE)
        self.loops.append((cond_block, after))
        body_end = self.statement(body, body_block)
        self.loops.pop()
        self.edge(body_end, cond_block, LOOP_BACK)
        self.edge(cond_block, after, FALSE)
        return after

    def build_repeat(self, node: Node, current: int) -> int:
        after = self.new_block()
        body_block = self.new_block()
        self.edge(current, body_block)
        self.loops.append((body_block, after))
        body_end = self.statement(node.children[0], body_block)
        self.loops.pop()
        self.edge(body_end, body_block, LOOP_BACK)
        return after

    def finish(self, last: int) -> Cfg:
        self.edge(last, self.cfg.exit)
        self._splice_empty_blocks()
        return self.cfg

    def _splice_empty_blocks(self) -> None:
        cfg = self.cfg
        changed = True
        while changed:
            changed = False
            for block in list(cfg.blocks):
                if block in (cfg.entry, cfg.exit) or cfg.blocks[block]:
                    continue
                outs = [(dst, label) for src, dst, label in cfg.edges if src == block]
                if len(outs) != 1:
                    continue
                succ, out_label = outs[0]
                if succ == block:
                    continue
                for src, dst, label in list(cfg.edges):
                    if dst == block:
                        cfg.edges.discard((src, dst, label))
                        merged = label if out_label == FALLTHROUGH else out_label
                        if label == LOOP_BACK or out_label == LOOP_BACK:
                            merged = LOOP_BACK
                        cfg.edges.add((src, succ, merged))
                cfg.edges.discard((block, succ, out_label))
                del cfg.blocks[block]
                changed = True


def build_cfg(ast: NormalizedAst, root: Node | None = None) -> Cfg:
    """Basic-block graph of the top-level statements (or a function body)."""
    builder = _CfgBuilder()
    start = builder.new_block()
    builder.edge(builder.cfg.entry, start)
    node = root if root is not None else ast.root
    last = builder.statement(node, start)
    return builder.finish(last)


def simplify_cfg(cfg: Cfg, condition_values: dict[int, object]) -> tuple[Cfg, set[int]]:
    """Drop branches whose condition is constantly TRUE or FALSE.

    `condition_values` maps condition NodeIds to abstract values; only exact
    logical singletons remove an edge. Returns the simplified graph and the
    set of blocks that became unreachable (the dead set).
    """
    from rslice.values import LogicalSet

    new = Cfg(
        blocks={b: list(ns) for b, ns in cfg.blocks.items()},
        edges=set(cfg.edges),
        entry=cfg.entry,
        exit=cfg.exit,
        conditions=dict(cfg.conditions),
    )
    for block, cond_node in cfg.conditions.items():
        value = condition_values.get(cond_node)
        if not isinstance(value, LogicalSet):
            continue
        if value.values == frozenset({False}):
            drop = TRUE
        elif value.values == frozenset({True}):
            drop = FALSE
        else:
            continue
        for src, dst, label in list(new.edges):
            if src == block and label == drop:
                new.edges.discard((src, dst, label))
    before = cfg.reachable()
    after = new.reachable()
    dead = {b for b in before - after if b not in (cfg.entry, cfg.exit)}
    for block in dead:
        del new.blocks[block]
    new.edges = {(s, d, l) for s, d, l in new.edges if s not in dead and d not in dead}
    new.conditions = {b: n for b, n in new.conditions.items() if b not in dead}
    return new, dead


def render_mermaid(cfg: Cfg, ast: NormalizedAst | None = None, dead: set[int] | None = None) -> str:
    """Flowchart-dialect diagram text; dead blocks carry a `dead` class tag."""
    lines = ["flowchart TD"]
    for block in sorted(cfg.blocks):
        nodes = cfg.blocks[block]
        if block == cfg.entry:
            text = "entry"
        elif block == cfg.exit:
            text = "exit"
        elif ast is not None:
            text = "; ".join(_snippet(ast, n) for n in nodes) or "∅"
        else:
            text = ", ".join(str(n) for n in nodes) or "∅"
        shape = f'b{block}(["{text}"])' if block in cfg.conditions else f'b{block}["{text}"]'
        lines.append(f"    {shape}")
    for src, dst, label in sorted(cfg.edges):
        glyph = _EDGE_GLYPH[label]
        arrow = f"-->|{glyph}|" if glyph else "-->"
        lines.append(f"    b{src} {arrow} b{dst}")
    if dead:
        lines.append(f"    classDef dead fill:#fdd,stroke:#c33")
        for block in sorted(dead):
            lines.append(f"    class b{block} dead")
    return "\n".join(lines)


def _snippet(ast: NormalizedAst, node_id: int) -> str:
    node = ast.nodes.get(node_id)
    if node is None:
        return str(node_id)
    start = node.location.start
    line = ast.source.lines[start.line - 1] if start.line <= len(ast.source.lines) else ""
    end_col = node.location.end.col if node.location.end.line == start.line else len(line) + 1
    return line[start.col - 1 : end_col - 1].strip() or node.label()
