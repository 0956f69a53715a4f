from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import gen
from rslice.dataflow import (
    VertexKind,
    build_dataflow,
    render_ascii,
    render_mermaid,
    resolve_call_targets,
)
from rslice.syntax.normalize import parse_and_normalize

GOLDEN_EDGES = [
    "2 -> 1: reads, argument",
    "2 -> 0: returns, argument",
    "0 -> 1: defined-by",
    "0 -> 2: defined-by",
]


def build(source: str):
    ast = parse_and_normalize(source)
    graph, env = build_dataflow(ast)
    return ast, graph, env


class TestAssignmentGraph:
    def test_golden_vertices_and_edges(self):
        _, graph, _ = build("x <- 2")
        assert len(graph.vertices) == 3
        assert len(graph.edges) == 4
        assert graph.vertices[0].kind is VertexKind.VARIABLE_DEFINITION
        assert graph.vertices[0].name == "x"
        assert graph.vertices[1].kind is VertexKind.VALUE
        assert graph.vertices[2].kind is VertexKind.FUNCTION_CALL
        assert graph.vertices[2].name == "<-"

    def test_golden_ascii_rendering(self):
        _, graph, _ = build("x <- 2")
        lines = render_ascii(graph).splitlines()
        assert lines[:3] == ["0 VariableDefinition x", "1 Value 2", "2 FunctionCall <-"]
        assert lines[3:] == GOLDEN_EDGES

    def test_empty_program(self):
        _, graph, _ = build("")
        assert render_ascii(graph) == ""

    def test_unresolved_use_footer(self):
        _, graph, _ = build("y <- x")
        output = render_ascii(graph)
        assert "unresolved: x" in output
        use = graph.vertices[1]
        assert use.kind is VertexKind.USE
        assert not [d for d, l in graph.outgoing(1) if "reads" in l]


class TestReachingDefinitions:
    def test_single_reaching_definition(self):
        _, graph, _ = build("x <- 1\ny <- x")
        use_x = next(
            vid for vid, v in graph.vertices.items()
            if v.kind is VertexKind.USE and v.name == "x"
        )
        reads = [dst for dst, labels in graph.outgoing(use_x) if "reads" in labels]
        assert reads == [0]

    def test_rebinding_shadows(self):
        _, graph, _ = build("x <- 1\nx <- 2\ny <- x")
        use_x = max(
            vid for vid, v in graph.vertices.items()
            if v.kind is VertexKind.USE and v.name == "x"
        )
        reads = {dst for dst, labels in graph.outgoing(use_x) if "reads" in labels}
        defs = {
            vid for vid, v in graph.vertices.items()
            if v.kind is VertexKind.VARIABLE_DEFINITION
        }
        assert reads == {max(defs & reads)} and len(reads) == 1

    def test_branches_merge_by_union(self):
        _, graph, _ = build("if (c) x <- 1 else x <- 2\ny <- x")
        use_x = next(
            vid for vid, v in graph.vertices.items()
            if v.kind is VertexKind.USE and v.name == "x"
        )
        reads = {dst for dst, labels in graph.outgoing(use_x) if "reads" in labels}
        assert len(reads) == 2

    def test_loop_fixpoint_reads_both_definitions(self):
        ast, graph, _ = build("x <- 0\nwhile(x < 20) x <- x + 1")
        uses = [
            vid for vid, v in graph.vertices.items()
            if v.kind is VertexKind.USE and v.name == "x"
        ]
        for use in uses:
            reads = {dst for dst, labels in graph.outgoing(use) if "reads" in labels}
            assert len(reads) == 2, f"use {use} reads {reads}"

    def test_fixpoint_is_stable(self):
        source = "x <- 0\nwhile(x < 20) { x <- x + 1\ny <- x * 2 }"
        _, g1, _ = build(source)
        _, g2, _ = build(source)
        assert g1.edges == g2.edges and set(g1.vertices) == set(g2.vertices)

    def test_super_assignment_writes_outer(self):
        _, graph, env = build("x <- 1\nbump <- function() x <<- 2\nbump()\ny <- x")
        use_y_rhs = max(
            vid for vid, v in graph.vertices.items()
            if v.kind is VertexKind.USE and v.name == "x"
        )
        reads = {dst for dst, labels in graph.outgoing(use_y_rhs) if "reads" in labels}
        inner_def = next(
            vid for vid, v in graph.vertices.items()
            if v.kind is VertexKind.VARIABLE_DEFINITION and v.name == "x" and vid != 0
        )
        assert inner_def in reads


class TestCallResolution:
    def test_user_function_target(self):
        _, graph, _ = build("f <- function() 1\nf()")
        call = next(
            vid for vid, v in graph.vertices.items()
            if v.kind is VertexKind.FUNCTION_CALL and v.name == "f"
        )
        targets = resolve_call_targets(graph, call)
        assert len(targets) == 1
        assert graph.vertices[targets.pop()].kind is VertexKind.FUNCTION_DEFINITION

    def test_unknown_callee_is_unresolved(self):
        _, graph, _ = build("g()")
        call = next(iter(graph.vertices))
        assert resolve_call_targets(graph, call) == set()
        assert call in graph.unresolved_calls

    def test_redefinition_takes_latest(self):
        _, graph, _ = build("f <- function() 1\nf <- function() 2\nf()")
        call = next(
            vid for vid, v in graph.vertices.items()
            if v.kind is VertexKind.FUNCTION_CALL and v.name == "f"
        )
        targets = resolve_call_targets(graph, call)
        fn_defs = sorted(
            vid for vid, v in graph.vertices.items()
            if v.kind is VertexKind.FUNCTION_DEFINITION
        )
        assert targets == {fn_defs[-1]}

    def test_non_call_raises(self):
        _, graph, _ = build("x <- 2")
        with pytest.raises(ValueError):
            resolve_call_targets(graph, 0)

    def test_parameters_bind_on_call(self):
        ast, graph, _ = build("f <- function(p) p + 1\nf(41)")
        param = next(
            vid for vid, v in graph.vertices.items()
            if v.kind is VertexKind.VARIABLE_DEFINITION and v.name == "p"
        )
        bound = [dst for dst, labels in graph.outgoing(param) if "defined-by-on-call" in labels]
        assert len(bound) == 1
        assert graph.vertices[bound[0]].name == "41"

    def test_library_argument_is_value_not_use(self):
        _, graph, _ = build("library(ggplot2)")
        kinds = {v.kind for v in graph.vertices.values()}
        assert VertexKind.USE not in kinds
        value = next(v for v in graph.vertices.values() if v.kind is VertexKind.VALUE)
        assert value.name == "ggplot2"
        assert not graph.unresolved_uses


class TestSourceInlining:
    def test_literal_source_inlines_bindings(self, tmp_path):
        (tmp_path / "lib.R").write_text("shared <- 42\n")
        (tmp_path / "main.R").write_text('source("lib.R")\ny <- shared + 1\n')
        from rslice.analysis import analyze

        analysis = analyze(str(tmp_path / "main.R"))
        use = next(
            vid for vid, v in analysis.graph.vertices.items()
            if v.kind is VertexKind.USE and v.name == "shared"
        )
        reads = [dst for dst, labels in analysis.graph.outgoing(use) if "reads" in labels]
        assert len(reads) == 1
        assert analysis.graph.vertices[reads[0]].name == "shared"
        assert not analysis.graph.unresolved_uses

    def test_computed_source_stays_unknown(self, tmp_path):
        (tmp_path / "main.R").write_text("p <- 'lib.R'\nsource(p)\ny <- shared\n")
        from rslice.analysis import analyze

        analysis = analyze(str(tmp_path / "main.R"))
        assert analysis.graph.unresolved_uses


class TestDeterminism:
    @given(st.integers(min_value=0, max_value=5_000))
    @settings(max_examples=30, deadline=None)
    def test_same_input_same_graph(self, seed):
        source = gen.straight_line(random.Random(seed), 10)
        _, g1, _ = build(source)
        _, g2, _ = build(source)
        assert list(g1.edges.items()) == list(g2.edges.items())
        assert {k: (v.kind, v.name) for k, v in g1.vertices.items()} == {
            k: (v.kind, v.name) for k, v in g2.vertices.items()
        }

    def test_use_invariant_reads_xor_unresolved(self):
        source = gen.straight_line(random.Random(99), 20)
        _, graph, _ = build(source)
        for vid, vertex in graph.vertices.items():
            if vertex.kind is not VertexKind.USE:
                continue
            has_reads = any("reads" in labels for _, labels in graph.outgoing(vid))
            assert has_reads != (vid in graph.unresolved_uses)


def test_mermaid_contains_vertices_and_edges():
    _, graph, _ = build("x <- 2")
    text = render_mermaid(graph)
    assert text.startswith("flowchart TD")
    assert 'n0["0 VariableDefinition: x"]' in text
    assert "n2 -->|reads, argument| n1" in text
