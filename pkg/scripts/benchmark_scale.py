#!/usr/bin/env python3
"""Timing probe: parse + normalize + dataflow over generated scripts.

Prints per-stage wall-clock times for a range of script sizes, echoing the
desk-scale performance budget (a 1000-line script must finish in <= 2 s).

Usage: python scripts/benchmark_scale.py [--sizes 100,500,1000,2000] [--seed 13]
"""
from __future__ import annotations

import argparse
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

import gen  # noqa: E402
from rslice.dataflow import build_dataflow  # noqa: E402
from rslice.syntax.normalize import normalize  # noqa: E402
from rslice.syntax.parser import parse  # noqa: E402
from rslice.source import SourceText  # noqa: E402


def bench(statements: int, seed: int) -> None:
    source = gen.with_branches(random.Random(seed), statements)
    lines = source.count("\n") + 1

    t0 = time.perf_counter()
    tree = parse(SourceText(source))
    t1 = time.perf_counter()
    ast = normalize(tree, source)
    t2 = time.perf_counter()
    graph, _ = build_dataflow(ast)
    t3 = time.perf_counter()

    print(
        f"{lines:>6} lines | parse {1000 * (t1 - t0):7.1f} ms | "
        f"normalize {1000 * (t2 - t1):6.1f} ms | dataflow {1000 * (t3 - t2):7.1f} ms | "
        f"total {1000 * (t3 - t0):7.1f} ms | {len(graph.vertices)} vertices, "
        f"{sum(len(l) for l in graph.edges.values())} edge labels"
    )


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="100,500,1000,2000")
    parser.add_argument("--seed", type=int, default=13)
    args = parser.parse_args()
    for size in (int(s) for s in args.sizes.split(",")):
        # with_branches counts statements; lines run ~1.5x higher
        bench(size, args.seed)


if __name__ == "__main__":
    main()
