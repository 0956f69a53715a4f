#!/usr/bin/env python3
"""Measure how much backward/forward slices shrink generated programs.

For each generated program, slices from every definition and reports the
average slice size as a fraction of the program's node count.

Usage: python scripts/slice_reduction.py [--programs 50] [--statements 40]
"""
from __future__ import annotations

import argparse
import random
import statistics
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

import gen  # noqa: E402
from rslice.dataflow import build_dataflow  # noqa: E402
from rslice.slicer import backward_slice, forward_slice  # noqa: E402
from rslice.syntax.normalize import parse_and_normalize  # noqa: E402


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--programs", type=int, default=50)
    parser.add_argument("--statements", type=int, default=40)
    parser.add_argument("--seed", type=int, default=20260809)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    backward_ratios: list[float] = []
    forward_ratios: list[float] = []
    for _ in range(args.programs):
        source = gen.straight_line(rng, args.statements)
        ast = parse_and_normalize(source)
        graph, _ = build_dataflow(ast)
        total = len(graph.vertices)
        for vertex in graph.vertices:
            backward_ratios.append(len(backward_slice(ast, graph, {vertex}).ids) / total)
            forward_ratios.append(len(forward_slice(ast, graph, {vertex}).ids) / total)

    print(f"programs: {args.programs}, statements each: {args.statements}")
    print(f"backward slice size: mean {100 * statistics.mean(backward_ratios):.1f}% "
          f"(median {100 * statistics.median(backward_ratios):.1f}%)")
    print(f"forward  slice size: mean {100 * statistics.mean(forward_ratios):.1f}% "
          f"(median {100 * statistics.median(forward_ratios):.1f}%)")


if __name__ == "__main__":
    main()
