"""Typed query dispatch and the dependency overview."""
from __future__ import annotations

from dataclasses import dataclass, field

from rslice.analysis import Analysis
from rslice.dataflow import VertexKind
from rslice.slicer import CriterionError, resolve_criterion
from rslice.syntax.ast import Node, NodeKind
from rslice.values import render_shape, render_value

_ADDON_PREFIXES = ("geom_", "stat_")


@dataclass
class DependencyItem:
    name: str
    location: dict
    via: str | None = None
    value: str | None = None
    linked: list["DependencyItem"] = field(default_factory=list)

    def payload(self) -> dict:
        out = {"name": self.name, "location": self.location}
        if self.via is not None:
            out["via"] = self.via
        if self.value is not None:
            out["value"] = self.value
        if self.linked:
            out["linked"] = [item.payload() for item in self.linked]
        return out


@dataclass
class DependencyReport:
    libraries: list[DependencyItem] = field(default_factory=list)
    reads: list[DependencyItem] = field(default_factory=list)
    writes: list[DependencyItem] = field(default_factory=list)
    visualizations: list[DependencyItem] = field(default_factory=list)

    def payload(self) -> dict:
        return {
            "libraries": [i.payload() for i in self.libraries],
            "reads": [i.payload() for i in self.reads],
            "writes": [i.payload() for i in self.writes],
            "visualizations": [i.payload() for i in self.visualizations],
        }

    def render_text(self) -> str:
        lines = []
        for title, items in (
            ("Libraries", self.libraries),
            ("Reads", self.reads),
            ("Writes", self.writes),
            ("Visualizations", self.visualizations),
        ):
            lines.append(f"{title}:")
            if not items:
                lines.append("  (none)")
            for item in items:
                loc = item.location
                detail = f" [{item.via}]" if item.via else ""
                if item.value is not None:
                    detail += f" {item.value}"
                lines.append(f"  {item.name}{detail} @ {loc['line']}:{loc['col']}")
                for linked in item.linked:
                    lines.append(f"    + {linked.name} @ {linked.location['line']}:{linked.location['col']}")
        return "\n".join(lines)


def _is_addon_name(analysis: Analysis, name: str) -> bool:
    if analysis.registry.tag_of(name) == "plot-addon":
        return True
    return name == "aes" or name.startswith(_ADDON_PREFIXES)


def _plus_chain(node: Node) -> list[Node]:
    """Left-to-right operands of a `+` chain."""
    if node.kind is NodeKind.BINARY and node.op == "+":
        return _plus_chain(node.children[0]) + [node.children[1]]
    return [node]


def link_plot_addons(analysis: Analysis) -> tuple[dict[int, list[int]], list[int]]:
    """Visualization call id -> linked addon call ids, plus unlinked addons.

    `+`-chained addon calls attach to the chain's plot-create head; bare base
    graphics addons attach to the closest dominating plot-create call.
    """
    links: dict[int, list[int]] = {}
    in_chain: set[int] = set()

    for node in analysis.ast.root.walk():
        if node.kind is not NodeKind.BINARY or node.op != "+":
            continue
        parent = analysis.ast.parent(node.id)
        if parent is not None and parent.kind is NodeKind.BINARY and parent.op == "+":
            continue  # only the outermost node of each chain
        operands = _plus_chain(node)
        head = operands[0]
        if head.kind is not NodeKind.CALL:
            continue
        if analysis.registry.tag_of(head.lexeme) != "plot-create":
            continue
        linked = links.setdefault(head.id, [])
        for operand in operands[1:]:
            if operand.kind is NodeKind.CALL and _is_addon_name(analysis, operand.lexeme):
                linked.append(operand.id)
                in_chain.add(operand.id)

    # base graphics: closest dominating create in the control-flow graph
    creates = _calls_tagged(analysis, "plot-create")
    addons = [c for c in _calls_tagged(analysis, "plot-addon") if c not in in_chain]
    unlinked: list[int] = []
    if addons:
        dominators = _block_dominators(analysis)
        blocks = _statement_blocks(analysis)
        for addon in addons:
            best = None
            for create in creates:
                if _dominates(analysis, blocks, dominators, create, addon):
                    location = analysis.graph.vertices[create].location.start
                    if best is None or location > analysis.graph.vertices[best].location.start:
                        best = create
            if best is None:
                unlinked.append(addon)
            else:
                links.setdefault(best, []).append(addon)
    return links, unlinked


def _calls_tagged(analysis: Analysis, tag: str) -> list[int]:
    return [
        vid
        for vid, vertex in sorted(analysis.graph.vertices.items())
        if vertex.kind is VertexKind.FUNCTION_CALL and analysis.registry.tag_of(vertex.name) == tag
    ]


def _statement_blocks(analysis: Analysis) -> dict[int, int]:
    table: dict[int, int] = {}
    for block, nodes in analysis.cfg.blocks.items():
        for node_id in nodes:
            table[node_id] = block
    return table


def _block_of(analysis: Analysis, blocks: dict[int, int], node_id: int) -> int | None:
    current: int | None = node_id
    while current is not None:
        if current in blocks:
            return blocks[current]
        parent = analysis.ast.parents.get(current)
        current = parent
    return None


def _block_dominators(analysis: Analysis) -> dict[int, set[int]]:
    cfg = analysis.cfg
    all_blocks = set(cfg.blocks)
    dom = {b: set(all_blocks) for b in all_blocks}
    dom[cfg.entry] = {cfg.entry}
    changed = True
    while changed:
        changed = False
        for block in all_blocks - {cfg.entry}:
            preds = [src for src, _ in cfg.predecessors(block)]
            if preds:
                new = set.intersection(*(dom[p] for p in preds)) | {block}
            else:
                new = {block}
            if new != dom[block]:
                dom[block] = new
                changed = True
    return dom


def _dominates(
    analysis: Analysis,
    blocks: dict[int, int],
    dominators: dict[int, set[int]],
    create: int,
    addon: int,
) -> bool:
    create_block = _block_of(analysis, blocks, create)
    addon_block = _block_of(analysis, blocks, addon)
    if create_block is None or addon_block is None:
        return False
    if create_block == addon_block:
        return analysis.graph.vertices[create].location.start < analysis.graph.vertices[addon].location.start
    return create_block in dominators.get(addon_block, set())


def build_dependency_report(analysis: Analysis) -> DependencyReport:
    report = DependencyReport()
    graph = analysis.graph

    def item(node_id: int, name: str, **kwargs) -> DependencyItem:
        location = analysis.range_payload(graph.vertices[node_id].location)
        return DependencyItem(name, location, **kwargs)

    seen_libraries: set[tuple[str, str]] = set()
    entries: list[tuple[tuple[int, int], DependencyItem]] = []
    for vid, vertex in graph.vertices.items():
        if vertex.kind is not VertexKind.FUNCTION_CALL:
            continue
        if analysis.registry.tag_of(vertex.name) == "library-load":
            for dst, labels in graph.outgoing(vid):
                if "argument" in labels:
                    package = graph.vertices[dst].name.strip("\"'")
                    if (package, vertex.name) not in seen_libraries:
                        seen_libraries.add((package, vertex.name))
                        position = (vertex.location.start.line, vertex.location.start.col)
                        entries.append((position, item(vid, package, via=vertex.name)))
    for node in analysis.ast.root.walk():
        if node.kind is NodeKind.NAMESPACE:
            package = node.children[0].lexeme
            if (package, node.op) not in seen_libraries:
                seen_libraries.add((package, node.op or "::"))
                position = (node.location.start.line, node.location.start.col)
                location = analysis.range_payload(node.location)
                entries.append((position, DependencyItem(package, location, via=node.op or "::")))
    report.libraries = [entry for _, entry in sorted(entries, key=lambda pair: pair[0])]

    for tag, bucket in (("file-read", report.reads), ("file-write", report.writes)):
        for vid in _calls_tagged(analysis, tag):
            vertex = graph.vertices[vid]
            path_value = _path_value(analysis, vid)
            bucket.append(item(vid, vertex.name, value=path_value))

    links, unlinked = link_plot_addons(analysis)
    for create in _calls_tagged(analysis, "plot-create"):
        vertex = graph.vertices[create]
        entry = item(create, vertex.name)
        for addon in links.get(create, []):
            entry.linked.append(item(addon, graph.vertices[addon].name))
        report.visualizations.append(entry)
    for addon in unlinked:
        report.visualizations.append(item(addon, graph.vertices[addon].name))
    return report


def _path_value(analysis: Analysis, call_id: int) -> str:
    node = analysis.node(call_id)
    if node is None or node.kind is not NodeKind.CALL:
        return "⊤"
    semantics = analysis.registry.lookup(node.lexeme)
    args = node.children[1:]
    target = None
    named = [a for a in args if a.kind is NodeKind.ARGUMENT and a.name == semantics.path_arg_name]
    if named:
        target = named[0]
    elif semantics.path_arg is not None:
        positional = [a for a in args if not (a.kind is NodeKind.ARGUMENT and a.name)]
        if semantics.path_arg < len(positional):
            target = positional[semantics.path_arg]
    if target is None:
        return "⊤"
    value_node = target.children[0] if target.kind is NodeKind.ARGUMENT else target
    return render_value(analysis.resolver.value_of(value_node.id))


def run_query(analysis: Analysis, queries: list[dict]) -> dict:
    """Answer each query, keyed by its type; per-query errors never abort."""
    results: dict[str, object] = {}
    for query in queries:
        qtype = query.get("type", "<missing>")
        try:
            results[qtype] = _dispatch(analysis, qtype, query)
        except CriterionError as err:
            results[qtype] = {"error": str(err)}
        except Exception as err:  # a failing query must not poison the batch
            results[qtype] = {"error": f"{type(err).__name__}: {err}"}
    return results


def _dispatch(analysis: Analysis, qtype: str, query: dict) -> dict:
    if qtype == "dependencies":
        return build_dependency_report(analysis).payload()
    if qtype == "resolve-value":
        out = {}
        for criterion in query.get("criteria", []):
            try:
                node_id = resolve_criterion(criterion, analysis.ast)
                out[criterion] = render_value(analysis.resolver.value_of(node_id))
            except CriterionError as err:
                out[criterion] = f"error: {err}"
        return {"values": out}
    if qtype == "df-shape":
        criterion = query.get("criterion", "")
        node_id = resolve_criterion(criterion, analysis.ast)
        shape = analysis.shapes.shape_of(node_id)
        return {
            "criterion": criterion,
            "columns": list(shape.columns),
            "open": shape.open,
            "rows": None if shape.rows is None else [shape.rows.lo, shape.rows.hi],
            "rendered": render_shape(shape),
        }
    if qtype == "static-slice":
        direction = query.get("direction", "backward")
        result = analysis.slice(query.get("criteria", []), direction)
        return {
            "direction": result.direction,
            "criteria": result.criteria,
            "ids": result.sorted_ids(),
            "lines": analysis.slice_lines(result),
            "code": result.code,
        }
    if qtype == "lint":
        from rslice.linter import LintConfig, lint

        config = LintConfig(rule_filter=query.get("rules"))
        report = lint(analysis, config)
        return report.payload(analysis)
    raise CriterionError(f"unknown query type {qtype!r}")
