from __future__ import annotations

from rslice.analysis import analyze
from rslice.queries import build_dependency_report, link_plot_addons, run_query


class TestDependencyReport:
    def test_walkthrough_counts(self, walkthrough):
        report = build_dependency_report(walkthrough)
        assert [(i.name, i.via, i.location["line"]) for i in report.libraries] == [
            ("ggplot2", "library", 1),
            ("dplyr", "::", 6),
        ]
        assert [(i.name, i.location["line"]) for i in report.reads] == [("read.csv", 3)]
        assert report.reads[0].value == '"/data/data.csv"'
        assert report.writes == []
        assert len(report.visualizations) == 1
        viz = report.visualizations[0]
        assert viz.name == "ggplot" and viz.location["line"] == 8
        assert [(l.name, l.location["line"]) for l in viz.linked] == [("geom_count", 9)]

    def test_empty_program(self):
        report = build_dependency_report(analyze(""))
        assert report.libraries == []
        assert report.reads == []
        assert report.writes == []
        assert report.visualizations == []

    def test_writes_reported(self):
        analysis = analyze('write.csv(df, "out.csv")')
        report = build_dependency_report(analysis)
        assert [(i.name, i.value) for i in report.writes] == [("write.csv", '"out.csv"')]

    def test_computed_path_renders_top(self):
        analysis = analyze("p <- make_path()\nd <- read.csv(p)")
        report = build_dependency_report(analysis)
        assert report.reads[0].value == "⊤"

    def test_render_text_groups(self, walkthrough):
        text = build_dependency_report(walkthrough).render_text()
        assert "Libraries:" in text and "Visualizations:" in text
        assert "geom_count" in text

    def test_bare_plot_is_a_visualization(self):
        report = build_dependency_report(analyze("plot(x)"))
        assert [(v.name, v.linked) for v in report.visualizations] == [("plot", [])]

    def test_custom_registry_category(self):
        from rslice.registry import BuiltInRegistry, BuiltinSemantics

        registry = BuiltInRegistry().with_entries({
            "fancy_chart": BuiltinSemantics("plot-create"),
            "fancy_layer": BuiltinSemantics("plot-addon"),
        })
        analysis = analyze("fancy_chart(d)\nfancy_layer(1)", registry=registry)
        report = build_dependency_report(analysis)
        assert [v.name for v in report.visualizations] == ["fancy_chart"]
        assert [l.name for l in report.visualizations[0].linked] == ["fancy_layer"]


class TestPlotLinking:
    def test_plus_chain(self, walkthrough):
        links, unlinked = link_plot_addons(walkthrough)
        assert len(links) == 1
        ((create, addons),) = links.items()
        assert walkthrough.graph.vertices[create].name == "ggplot"
        assert [walkthrough.graph.vertices[a].name for a in addons] == ["geom_count"]
        assert not unlinked

    def test_base_graphics_dominating_create(self):
        analysis = analyze("plot(x)\nabline(h=1)")
        links, unlinked = link_plot_addons(analysis)
        ((create, addons),) = links.items()
        assert analysis.graph.vertices[create].name == "plot"
        assert [analysis.graph.vertices[a].name for a in addons] == ["abline"]
        assert not unlinked

    def test_most_recent_create_wins(self):
        analysis = analyze("plot(x)\nplot(y)\nlines(z)")
        links, _ = link_plot_addons(analysis)
        linked_creates = [c for c, addons in links.items() if addons]
        assert len(linked_creates) == 1
        create = linked_creates[0]
        assert analysis.graph.vertices[create].location.start.line == 2

    def test_addon_without_create_is_unlinked(self):
        analysis = analyze("abline(h=1)")
        links, unlinked = link_plot_addons(analysis)
        assert not links
        assert len(unlinked) == 1

    def test_branch_create_does_not_dominate(self):
        analysis = analyze("if (c) plot(x)\nlines(z)")
        links, unlinked = link_plot_addons(analysis)
        assert len(unlinked) == 1


class TestRunQuery:
    def test_dependencies_query(self, walkthrough):
        out = run_query(walkthrough, [{"type": "dependencies"}])
        report = out["dependencies"]
        assert len(report["libraries"]) == 2
        assert len(report["reads"]) == 1
        assert len(report["visualizations"]) == 1

    def test_resolve_value_query(self, walkthrough):
        out = run_query(walkthrough, [{"type": "resolve-value", "criteria": ["4@min_age"]}])
        assert out["resolve-value"]["values"]["4@min_age"] == "[42L, 42L]"

    def test_df_shape_query(self):
        analysis = analyze("df <- data.frame(a=c(1,2), b=c(3,4))\ndf")
        out = run_query(analysis, [{"type": "df-shape", "criterion": "2@df"}])
        shape = out["df-shape"]
        assert shape["columns"] == ["a", "b"]
        assert shape["rows"] == [2, 2]
        assert not shape["open"]

    def test_static_slice_matches_slicer(self, walkthrough):
        out = run_query(
            walkthrough,
            [{"type": "static-slice", "criteria": ["3@read.csv"], "direction": "forward"}],
        )
        direct = walkthrough.slice(["3@read.csv"], "forward")
        assert out["static-slice"]["ids"] == direct.sorted_ids()

    def test_lint_query(self, walkthrough):
        out = run_query(walkthrough, [{"type": "lint"}])
        diagnostics = out["lint"]["diagnostics"]
        assert [d["rule"] for d in diagnostics] == ["absolute-file-path"]

    def test_unknown_query_type_is_isolated(self, walkthrough):
        out = run_query(walkthrough, [{"type": "nonsense"}, {"type": "dependencies"}])
        assert "error" in out["nonsense"]
        assert "libraries" in out["dependencies"]

    def test_bad_criterion_is_reported_inside_result(self, walkthrough):
        out = run_query(walkthrough, [{"type": "df-shape", "criterion": "99:99"}])
        assert "error" in out["df-shape"]

    def test_repeated_queries_are_equal(self, walkthrough):
        first = run_query(walkthrough, [{"type": "dependencies"}])
        second = run_query(walkthrough, [{"type": "dependencies"}])
        assert first == second


def test_locations_map_through_notebooks():
    from rslice.project import AnalysisRequest

    qmd = "\n".join([
        "```{r}",
        "library(ggplot2)",
        'd <- read.csv("/tmp/x.csv")',
        "```",
    ])
    analysis = analyze(AnalysisRequest("text", "qmd", content=qmd))
    report = build_dependency_report(analysis)
    assert report.libraries[0].location["line"] == 2
    assert report.reads[0].location["line"] == 3
