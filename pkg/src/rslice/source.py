"""Source text carrier with 1-based line/column coordinates."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, order=True)
class Location:
    """A 1-based (line, column) position, measured in characters."""

    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


@dataclass(frozen=True)
class Range:
    """Half-open is tempting, but R tooling convention is inclusive ends."""

    start: Location
    end: Location

    def contains(self, other: "Range") -> bool:
        return self.start <= other.start and other.end <= self.end

    def __str__(self) -> str:
        return f"{self.start}-{self.end}"


@dataclass(frozen=True)
class SourceText:
    """UTF-8 program text plus its origin (a path or a literal tag)."""

    content: str
    origin: str = "<text>"

    @property
    def lines(self) -> list[str]:
        return self.content.split("\n")

    def line(self, number: int) -> str:
        """Return the 1-based line `number` (without the newline)."""
        lines = self.lines
        if not 1 <= number <= len(lines):
            raise IndexError(f"line {number} outside {self.origin} (1..{len(lines)})")
        return lines[number - 1]

    def offset_of(self, loc: Location) -> int:
        """Character offset of `loc` within the content."""
        lines = self.lines
        if not 1 <= loc.line <= len(lines):
            raise IndexError(f"{loc} outside {self.origin}")
        text = lines[loc.line - 1]
        if not 1 <= loc.col <= len(text) + 1:
            raise IndexError(f"{loc} outside line {loc.line} of {self.origin}")
        return sum(len(l) + 1 for l in lines[: loc.line - 1]) + (loc.col - 1)

    def location_of(self, offset: int) -> Location:
        """Inverse of :meth:`offset_of`."""
        if not 0 <= offset <= len(self.content):
            raise IndexError(f"offset {offset} outside {self.origin}")
        before = self.content[:offset]
        line = before.count("\n") + 1
        col = offset - (before.rfind("\n") + 1) + 1
        return Location(line, col)


class ParseError(Exception):
    """Raised when the source does not belong to the supported R subset."""

    def __init__(self, message: str, location: Location, expected: str | None = None):
        self.message = message
        self.location = location
        self.expected = expected
        hint = f" (expected {expected})" if expected else ""
        super().__init__(f"{location}: {message}{hint}")
