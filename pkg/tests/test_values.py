from __future__ import annotations

import math
import random

from hypothesis import given, settings
from hypothesis import strategies as st

import gen
import interp
from rslice.analysis import analyze
from rslice.dataflow import build_dataflow
from rslice.source import SourceText
from rslice.syntax.ast import NodeKind
from rslice.syntax.normalize import parse_and_normalize
from rslice.values import (
    BOTTOM,
    TOP,
    DataFrameShape,
    Interval,
    LogicalSet,
    StringSet,
    ValueResolver,
    interval,
    join,
    logical,
    render_shape,
    render_value,
    resolve_value,
    strings,
    widen,
)


def value_of(source: str, name: str, fuel: int = 2):
    """Abstract value of the last definition or use of `name`."""
    ast = parse_and_normalize(source)
    graph, _ = build_dataflow(ast)
    candidates = [
        n.id for n in ast.root.walk()
        if n.kind is NodeKind.SYMBOL and n.lexeme == name and n.id in graph.vertices
    ]
    return resolve_value(ast, graph, max(candidates), fuel=fuel)


class TestLattice:
    def test_join_intervals_hulls(self):
        assert join(interval(1, 2, True), interval(5, 6, True)) == interval(1, 6, True)

    def test_join_mixed_kinds_is_top(self):
        assert join(interval(1), strings("a")) == TOP

    def test_join_idempotent_commutative(self):
        values = [interval(0, 3, True), strings("a", "b"), logical(True), TOP, BOTTOM]
        for a in values:
            assert join(a, a) == a
            for b in values:
                assert join(a, b) == join(b, a)

    def test_join_associative(self):
        a, b, c = interval(0, 1), interval(5, 9), interval(-3, -2)
        assert join(join(a, b), c) == join(a, join(b, c))

    def test_widen_growing_upper_bound(self):
        assert widen(interval(0, 1, True), interval(0, 2, True)) == Interval(0, math.inf, True)

    def test_widen_fixpoint(self):
        assert widen(interval(0, 2), interval(0, 2)) == interval(0, 2)

    def test_widen_small_string_set_joins(self):
        assert widen(strings("a"), strings("a", "b")) == strings("a", "b")

    def test_widen_large_string_set_collapses(self):
        big = strings(*[f"s{i}" for i in range(9)])
        assert widen(strings("s0"), big) == StringSet(None)


class TestRendering:
    def test_integral_point_interval(self):
        assert render_value(interval(42, 42, True)) == "[42L, 42L]"

    def test_non_integral_interval(self):
        assert render_value(interval(1.5, 2.5)) == "[1.5, 2.5]"

    def test_infinite_bound(self):
        assert render_value(Interval(0, math.inf, True)) == "[0L, Inf]"

    def test_string_set(self):
        assert render_value(strings("id")) == '"id"'

    def test_logical_singletons(self):
        assert render_value(logical(True)) == "TRUE"
        assert render_value(logical(False)) == "FALSE"

    def test_top(self):
        assert render_value(TOP) == "⊤"


class TestResolution:
    def test_integer_literal(self):
        assert value_of("min_age <- 42", "min_age") == interval(42, 42, True)
        assert render_value(value_of("min_age <- 42", "min_age")) == "[42L, 42L]"

    def test_string_literal(self):
        assert value_of('coln <- "id"\nuse(coln)', "coln") == strings("id")

    def test_branch_join(self):
        got = value_of("if (c) x <- 1 else x <- 2\ny <- x", "x")
        assert got == interval(1, 2, True)

    def test_arithmetic(self):
        assert value_of("a <- 2\nb <- a * 3 + 1", "b") == interval(7, 7, True)

    def test_division_is_double(self):
        got = value_of("a <- 4\nb <- a / 2", "b")
        assert got == Interval(2, 2, False)

    def test_unknown_call_is_top(self):
        assert value_of("x <- mystery()", "x") == TOP

    def test_comparison_definite(self):
        assert value_of("x <- 1 < 2", "x") == logical(True)

    def test_loop_widens_to_infinity(self):
        got = value_of("x <- 0\nwhile (x < 20) x <- x + 1\ny <- x", "y", fuel=2)
        assert isinstance(got, Interval)
        assert got.lo == 0 and got.hi == math.inf

    def test_interprocedural_return(self):
        assert value_of("f <- function() 21\nx <- f() * 2", "x") == interval(42, 42, True)

    def test_range_value(self):
        assert value_of("r <- 1:10\ny <- r", "y") == interval(1, 10, True)


@given(st.integers(min_value=0, max_value=20_000), st.integers(min_value=1, max_value=15))
@settings(max_examples=80, deadline=None)
def test_soundness_on_straight_line_programs(seed, size):
    source = gen.arithmetic_block(random.Random(seed), size)
    ast = parse_and_normalize(source)
    graph, _ = build_dataflow(ast)
    try:
        result = interp.run_program(ast)
    except interp.RuntimeFault:
        return
    resolver = ValueResolver(ast, graph)
    statements = {stmt_id: env for stmt_id, env in result.snapshots}
    for statement in ast.root.children:
        if statement.kind is not NodeKind.ASSIGNMENT:
            continue
        target = statement.children[0]
        concrete = statements[statement.id].get(target.lexeme)
        if not isinstance(concrete, (int, float)) or isinstance(concrete, bool):
            continue
        abstract = resolver.value_of(target.id)
        assert abstract == TOP or (
            isinstance(abstract, Interval) and abstract.lo <= concrete <= abstract.hi
        ), f"{source}\n{target.lexeme}={concrete} not in {abstract}"


class TestShapes:
    def test_data_frame_literal(self):
        analysis = analyze("df <- data.frame(a=c(1,2,3), b=c(4,5,6))\ndf")
        shape = analysis.shapes.shape_of(analysis.ast.root.children[-1].id)
        assert shape.columns == ("a", "b")
        assert not shape.open
        assert shape.rows == interval(3, 3, True)

    def test_scalar_recycling(self):
        analysis = analyze("df <- data.frame(a=c(1,2,3), b=0)\ndf")
        shape = analysis.shapes.shape_of(analysis.ast.root.children[-1].id)
        assert shape.rows == interval(3, 3, True)

    def test_missing_csv_is_unknown(self):
        analysis = analyze('df <- read.csv("missing.csv")\ndf')
        shape = analysis.shapes.shape_of(analysis.ast.root.children[-1].id)
        assert shape.open
        assert shape.rows is None

    def test_readable_csv_counts(self, tmp_path):
        csv_file = tmp_path / "people.csv"
        csv_file.write_text("age,m\n1,2\n3,4\n5,6\n7,8\n")
        code = f'df <- read.csv("{csv_file}")\ndf'
        analysis = analyze(SourceText(code, "<test>"))
        shape = analysis.shapes.shape_of(analysis.ast.root.children[-1].id)
        assert shape.columns == ("age", "m")
        assert shape.rows == interval(4, 4, True)

    def test_filter_relaxes_rows(self):
        analysis = analyze("df <- data.frame(a=c(1,2,3,4))\nx <- filter(df, a > 1)\nx")
        shape = analysis.shapes.shape_of(analysis.ast.root.children[-1].id)
        assert shape.rows == Interval(0, 4, True)

    def test_figure_pipeline(self):
        source = "\n".join([
            'a <- data.frame(foo=c(1,2,3,4), score=c(2,4,6,8), id=c("p","q","r","s"))',
            'b <- data.frame(id=c("p","q","r","s"), age=c(10,20,30,40))',
            'coln <- "id"',
            "x <- a |>",
            "   mutate(level=score^2) |>",
            "   left_join(b, by=coln) |>",
            "   select(-age)",
            "x",
        ])
        analysis = analyze(source)
        shape = analysis.shapes.shape_of(analysis.ast.root.children[-1].id)
        assert shape.columns == ("foo", "score", "level", "id")
        assert not shape.open
        assert shape.rows == interval(4, 4, True)
        assert render_shape(shape) == (
            "a data frame with 4 rows, and known columns: foo, score, level, id"
        )

    def test_select_keeps_exactly(self):
        analysis = analyze("df <- data.frame(a=1, b=2, c=3)\nx <- select(df, a, b)\nx")
        shape = analysis.shapes.shape_of(analysis.ast.root.children[-1].id)
        assert shape.columns == ("a", "b")
        assert not shape.open

    def test_non_data_frame_is_open_unknown(self):
        analysis = analyze("x <- 1\nx")
        shape = analysis.shapes.shape_of(analysis.ast.root.children[-1].id)
        assert shape.open and shape.rows is None

    def test_render_shape_without_rows(self):
        shape = DataFrameShape(("a", "b"), open=False, rows=None)
        assert render_shape(shape) == "a data frame with known columns: a, b"

    def test_render_shape_row_range(self):
        shape = DataFrameShape((), open=True, rows=Interval(0, 4, True))
        assert render_shape(shape) == "a data frame with between 0 and 4 rows"
