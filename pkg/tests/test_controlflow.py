from __future__ import annotations

import random

from hypothesis import given, settings
from hypothesis import strategies as st

import gen
import interp
from rslice.controlflow import FALSE, LOOP_BACK, TRUE, Cfg, build_cfg, render_mermaid, simplify_cfg
from rslice.syntax.normalize import parse_and_normalize
from rslice.values import ValueResolver


def build(source: str):
    ast = parse_and_normalize(source)
    return ast, build_cfg(ast)


def edges_by_label(cfg: Cfg) -> dict[str, int]:
    out: dict[str, int] = {}
    for _, _, label in cfg.edges:
        out[label] = out.get(label, 0) + 1
    return out


class TestWhileGolden:
    SOURCE = "x <- 0\nwhile(x < 20) {\n   x <- x + 1\n}"

    def test_five_blocks(self):
        _, cfg = build(self.SOURCE)
        assert len(cfg.blocks) == 5  # entry, x<-0, cond, body, exit

    def test_edge_structure(self):
        ast, cfg = build(self.SOURCE)
        labels = edges_by_label(cfg)
        assert labels == {"fallthrough": 2, TRUE: 1, FALSE: 1, LOOP_BACK: 1}
        (cond_block,) = cfg.conditions
        true_edges = [(s, d) for s, d, l in cfg.edges if l == TRUE]
        false_edges = [(s, d) for s, d, l in cfg.edges if l == FALSE]
        back_edges = [(s, d) for s, d, l in cfg.edges if l == LOOP_BACK]
        assert true_edges[0][0] == cond_block
        assert false_edges[0] == (cond_block, cfg.exit)
        assert back_edges[0][1] == cond_block

    def test_condition_block_has_top_and_bottom_successor(self):
        _, cfg = build(self.SOURCE)
        (cond_block,) = cfg.conditions
        labels = sorted(label for _, label in cfg.successors(cond_block))
        assert labels == [FALSE, TRUE]

    def test_entry_exit_invariants(self):
        _, cfg = build(self.SOURCE)
        assert not cfg.predecessors(cfg.entry)
        assert not cfg.successors(cfg.exit)
        assert cfg.reachable() == set(cfg.blocks)


class TestShapes:
    def test_consecutive_assignments_coalesce(self):
        _, cfg = build("x <- 1\ny <- 2\nz <- x + y")
        interior = [b for b in cfg.blocks if b not in (cfg.entry, cfg.exit)]
        assert len(interior) == 1
        assert len(cfg.blocks[interior[0]]) == 3

    def test_if_else_diamond(self):
        ast, cfg = build("if (c) a <- 1 else b <- 2\nz <- 3")
        (cond_block,) = cfg.conditions
        paths = {label: dst for dst, label in cfg.successors(cond_block)}
        assert set(paths) == {TRUE, FALSE}
        join_targets = {dst for branch in paths.values() for dst, _ in cfg.successors(branch)}
        assert len(join_targets) == 1  # both branches meet again

    def test_if_without_else_falls_through(self):
        _, cfg = build("if (c) a <- 1\nz <- 3")
        (cond_block,) = cfg.conditions
        false_edge = [dst for dst, label in cfg.successors(cond_block) if label == FALSE]
        assert len(false_edge) == 1

    def test_break_exits_loop(self):
        _, cfg = build("while (TRUE) {\n  x <- 1\n  break\n}\ny <- 2")
        assert cfg.reachable() == set(cfg.blocks)

    def test_next_returns_to_condition(self):
        ast, cfg = build("while (c) {\n  next\n}\ny <- 2")
        (cond_block,) = cfg.conditions
        next_id = next(n.id for n in ast.root.walk() if n.kind.value == "Next")
        next_block = cfg.block_of(next_id)
        assert (next_block, cond_block, LOOP_BACK) in cfg.edges

    def test_repeat_loops_unconditionally(self):
        _, cfg = build("repeat {\n  x <- x + 1\n  if (x > 3) break\n}\ny <- 2")
        assert edges_by_label(cfg).get(LOOP_BACK) == 1
        assert cfg.reachable() == set(cfg.blocks)

    def test_repeat_with_unconditional_break_drops_dead_loop_back(self):
        _, cfg = build("repeat {\n  x <- 1\n  break\n}\ny <- 2")
        assert LOOP_BACK not in edges_by_label(cfg)
        assert cfg.reachable() == set(cfg.blocks)

    def test_for_loop_has_next_condition(self):
        ast, cfg = build("for (i in 1:3) {\n  s <- i\n}")
        (cond_block,) = cfg.conditions
        for_node = next(n for n in ast.root.walk() if n.kind.value == "For")
        assert cfg.conditions[cond_block] == for_node.id
        labels = sorted(label for _, label in cfg.successors(cond_block))
        assert labels == [FALSE, TRUE]


class TestSimplify:
    def resolve_conditions(self, source: str):
        ast = parse_and_normalize(source)
        from rslice.dataflow import build_dataflow

        graph, _ = build_dataflow(ast)
        cfg = build_cfg(ast)
        resolver = ValueResolver(ast, graph)
        values = {n: resolver.value_of(n) for n in cfg.conditions.values()}
        return cfg, values

    def test_constant_false_removes_then(self):
        cfg, values = self.resolve_conditions("if (FALSE) x <- 1\ny <- 2")
        simplified, dead = simplify_cfg(cfg, values)
        assert len(dead) == 1
        assert len(simplified.blocks) == len(cfg.blocks) - 1

    def test_constant_true_removes_else(self):
        cfg, values = self.resolve_conditions("if (TRUE) x <- 1 else y <- 2\nz <- 3")
        simplified, dead = simplify_cfg(cfg, values)
        assert len(dead) == 1

    def test_unknown_condition_keeps_graph(self):
        cfg, values = self.resolve_conditions("if (c) x <- 1 else y <- 2")
        simplified, dead = simplify_cfg(cfg, values)
        assert not dead
        assert simplified.blocks == cfg.blocks and simplified.edges == cfg.edges

    def test_idempotent(self):
        cfg, values = self.resolve_conditions("if (FALSE) x <- 1\ny <- 2")
        once, _ = simplify_cfg(cfg, values)
        twice, dead = simplify_cfg(once, values)
        assert not dead
        assert once.blocks == twice.blocks and once.edges == twice.edges

    def test_never_removes_reachable_branch(self):
        source = "x <- 1\nif (x > 0) y <- 1 else y <- 2\nz <- y"
        cfg, values = self.resolve_conditions(source)
        simplified, dead = simplify_cfg(cfg, values)
        ast = parse_and_normalize(source)
        result = interp.run_program(ast)
        executed = set(result.trace)
        for block in dead:
            for node_id in cfg.blocks[block]:
                assert node_id not in executed


def _match_path(cfg: Cfg, trace: list[int]) -> bool:
    """Can the trace be laid over a path entry -> exit?"""
    state = (cfg.entry, 0)
    i = 0
    while i < len(trace):
        block, offset = state
        contents = cfg.blocks[block]
        if offset < len(contents):
            if contents[offset] != trace[i]:
                return False
            state = (block, offset + 1)
            i += 1
            continue
        for dst, _ in cfg.successors(block):
            inner = cfg.blocks[dst]
            if inner and inner[0] == trace[i]:
                state = (dst, 0)
                break
        else:
            return False
    # drain to exit over empty blocks
    block, offset = state
    seen = set()
    while block != cfg.exit:
        if offset < len(cfg.blocks[block]):
            return False
        advanced = False
        for dst, _ in cfg.successors(block):
            if not cfg.blocks[dst] or dst == cfg.exit:
                if dst in seen:
                    continue
                seen.add(dst)
                block, offset = dst, 0
                advanced = True
                break
        if not advanced:
            return False
    return True


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=60, deadline=None)
def test_every_execution_is_a_cfg_path(seed):
    rng = random.Random(seed)
    source = gen.with_branches(rng, rng.randint(2, 12))
    ast = parse_and_normalize(source)
    cfg = build_cfg(ast)
    try:
        result = interp.run_program(ast)
    except interp.RuntimeFault:
        return  # e.g. comparison against an undefined name
    assert _match_path(cfg, result.trace), f"{source}\ntrace={result.trace}\nblocks={cfg.blocks}"


def test_mermaid_render_marks_dead_blocks():
    ast = parse_and_normalize("if (FALSE) x <- 1\ny <- 2")
    from rslice.dataflow import build_dataflow

    graph, _ = build_dataflow(ast)
    cfg = build_cfg(ast)
    resolver = ValueResolver(ast, graph)
    values = {n: resolver.value_of(n) for n in cfg.conditions.values()}
    _, dead = simplify_cfg(cfg, values)
    text = render_mermaid(cfg, ast, dead)
    assert "classDef dead" in text
    assert "⊤" in text and "⊥" in text
