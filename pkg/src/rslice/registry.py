"""Registry of built-in function semantics.

Lookups are total: anything unknown is `pure-unknown`, i.e. a function that
forces all of its arguments and returns a fresh unknown value.
"""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class BuiltinSemantics:
    tag: str
    # which argument carries a file path (positional index and/or name)
    path_arg: int | None = None
    path_arg_name: str | None = None
    verb: str | None = None


PURE_UNKNOWN = BuiltinSemantics("pure-unknown")


def _default_table() -> dict[str, BuiltinSemantics]:
    table: dict[str, BuiltinSemantics] = {}
    for name in ("library", "require", "requireNamespace"):
        table[name] = BuiltinSemantics("library-load")
    reads = {
        "read.csv": (0, "file"),
        "read.table": (0, "file"),
        "readRDS": (0, "file"),
        "readLines": (0, "con"),
        "scan": (0, "file"),
        "source": (0, "file"),
    }
    for name, (idx, argname) in reads.items():
        table[name] = BuiltinSemantics("file-read", path_arg=idx, path_arg_name=argname)
    writes = {
        "write.csv": (1, "file"),
        "write.table": (1, "file"),
        "saveRDS": (1, "file"),
        "writeLines": (1, "con"),
        "ggsave": (0, "filename"),
        "pdf": (0, "file"),
        "png": (0, "filename"),
    }
    for name, (idx, argname) in writes.items():
        table[name] = BuiltinSemantics("file-write", path_arg=idx, path_arg_name=argname)
    for name in ("plot", "ggplot", "hist", "boxplot", "barplot"):
        table[name] = BuiltinSemantics("plot-create")
    for name in ("abline", "lines", "points", "legend"):
        table[name] = BuiltinSemantics("plot-addon")
    for name in ("sample", "runif", "rnorm", "rbinom"):
        table[name] = BuiltinSemantics("rng")
    table["set.seed"] = BuiltinSemantics("seed")
    table["data.frame"] = BuiltinSemantics("df-constructor")
    for name in ("mutate", "select", "filter", "left_join"):
        table[name] = BuiltinSemantics("df-verb", verb=name)
    return table


# which package provides which callables; prefixes end with '_'
_PACKAGE_EXPORTS: dict[str, tuple[set[str], tuple[str, ...]]] = {
    "ggplot2": ({"ggplot", "aes", "ggsave", "qplot"}, ("geom_", "stat_", "scale_", "theme_")),
    "dplyr": (
        {"mutate", "select", "filter", "left_join", "arrange", "group_by",
         "summarise", "summarize", "filter_all", "rename", "pull"},
        (),
    ),
}


@dataclass
class BuiltInRegistry:
    table: dict[str, BuiltinSemantics] = field(default_factory=_default_table)
    package_exports: dict[str, tuple[set[str], tuple[str, ...]]] = field(
        default_factory=lambda: dict(_PACKAGE_EXPORTS)
    )

    def package_provides(self, package: str, function: str) -> bool:
        names, prefixes = self.package_exports.get(package, (set(), ()))
        return function in names or any(function.startswith(p) for p in prefixes)

    def lookup(self, name: str) -> BuiltinSemantics:
        return self.table.get(name, PURE_UNKNOWN)

    def tag_of(self, name: str) -> str:
        return self.lookup(name).tag

    def names_tagged(self, tag: str) -> set[str]:
        return {name for name, sem in self.table.items() if sem.tag == tag}

    def with_entries(self, extra: dict[str, BuiltinSemantics]) -> "BuiltInRegistry":
        merged = dict(self.table)
        merged.update(extra)
        return BuiltInRegistry(merged)
