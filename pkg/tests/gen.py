"""Random subset-program generators for the oracle suites."""
from __future__ import annotations

import random

NAMES = ["x", "y", "z", "a", "b", "n", "k", "total", "err", "w"]
UNKNOWN_FNS = ["f", "g", "h", "compute", "load_part"]


def _fresh(rng: random.Random, defined: list[str]) -> str:
    candidates = [n for n in NAMES if n not in defined]
    if candidates and rng.random() < 0.7:
        return rng.choice(candidates)
    return rng.choice(NAMES) if not defined else rng.choice(defined + NAMES)


def _literal(rng: random.Random) -> str:
    if rng.random() < 0.2:
        return f"{rng.uniform(-5, 5):.2f}"
    return str(rng.randint(-9, 9))


def _expr(rng: random.Random, defined: list[str], depth: int, executable: bool) -> str:
    if depth <= 0 or rng.random() < 0.3:
        if defined and rng.random() < 0.6:
            return rng.choice(defined)
        return _literal(rng)
    roll = rng.random()
    if roll < 0.55:
        op = rng.choice(["+", "-", "*"])
        left = _expr(rng, defined, depth - 1, executable)
        right = _expr(rng, defined, depth - 1, executable)
        return f"({left} {op} {right})"
    if roll < 0.65:
        return f"-{_expr(rng, defined, depth - 1, executable)}"
    if roll < 0.75 and not executable:
        fn = rng.choice(UNKNOWN_FNS)
        args = ", ".join(_expr(rng, defined, depth - 1, executable) for _ in range(rng.randint(0, 2)))
        return f"{fn}({args})"
    if roll < 0.85 and not executable:
        fn = rng.choice(UNKNOWN_FNS)
        return f"{_expr(rng, defined, depth - 1, executable)} |> {fn}()"
    return _expr(rng, defined, depth - 1, executable)


def straight_line(rng: random.Random, n_statements: int, executable: bool = False) -> str:
    """Assignments over literals, prior variables, and (when not executable)
    calls to undefined functions and pipes."""
    defined: list[str] = []
    lines = []
    for _ in range(n_statements):
        name = _fresh(rng, defined)
        lines.append(f"{name} <- {_expr(rng, defined, rng.randint(1, 3), executable)}")
        if name not in defined:
            defined.append(name)
    return "\n".join(lines)


def with_branches(rng: random.Random, n_statements: int) -> str:
    """Executable straight-line code with deterministic if/else blocks."""
    defined: list[str] = []
    lines = []
    statements = 0
    while statements < n_statements:
        if defined and rng.random() < 0.25 and statements + 2 <= n_statements:
            cond_var = rng.choice(defined)
            cmp = rng.choice(["<", "<=", ">", ">=", "==", "!="])
            name = _fresh(rng, defined)
            then_expr = _expr(rng, defined, 2, True)
            else_expr = _expr(rng, defined, 2, True)
            lines.append(f"if ({cond_var} {cmp} {_literal(rng)}) {{")
            lines.append(f"  {name} <- {then_expr}")
            lines.append("} else {")
            lines.append(f"  {name} <- {else_expr}")
            lines.append("}")
            if name not in defined:
                defined.append(name)
            statements += 2
        else:
            name = _fresh(rng, defined)
            lines.append(f"{name} <- {_expr(rng, defined, rng.randint(1, 3), True)}")
            if name not in defined:
                defined.append(name)
            statements += 1
    return "\n".join(lines)


def arithmetic_block(rng: random.Random, n_statements: int) -> str:
    """Pure straight-line arithmetic (for the value-soundness suite)."""
    return straight_line(rng, n_statements, executable=True)
