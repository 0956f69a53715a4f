"""Static dataflow analysis, slicing, and linting for a subset of R."""

__version__ = "0.1.0"

from rslice.analysis import Analysis, analyze
from rslice.registry import BuiltInRegistry
from rslice.source import SourceText

__all__ = ["Analysis", "analyze", "BuiltInRegistry", "SourceText", "__version__"]
