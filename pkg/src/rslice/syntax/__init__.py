"""Parsing, normalization, and reprinting of the supported R subset."""
from rslice.syntax.ast import Node, NodeKind, NormalizedAst
from rslice.syntax.normalize import normalize
from rslice.syntax.parser import parse
from rslice.syntax.reprint import reprint

__all__ = ["Node", "NodeKind", "NormalizedAst", "normalize", "parse", "reprint"]
