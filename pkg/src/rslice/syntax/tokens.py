"""Tokenizer for the R subset."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from rslice.source import Location, ParseError, SourceText

KEYWORDS = {
    "if", "else", "for", "while", "repeat", "function",
    "break", "next", "in", "TRUE", "FALSE", "NULL",
}

# Longest match first; '%>%' is the only %-operator in the subset.
# ']]' is intentionally absent: 'a[b[1]]' must close two separate brackets.
OPERATORS = [
    "<<-", ":::", "%>%", "->", "<-", "|>", "::", "[[",
    "<=", ">=", "==", "!=", "&&", "||",
    "$", "[", "]", "(", ")", "{", "}", ",", ";",
    "+", "-", "*", "/", "^", ":", "<", ">", "&", "|", "!", "=",
]

STRING_ESCAPES = {"\\": "\\", '"': '"', "'": "'", "n": "\n", "t": "\t"}


class TokenKind(Enum):
    NUMBER = "number"
    STRING = "string"
    SYMBOL = "symbol"
    KEYWORD = "keyword"
    OP = "op"
    NEWLINE = "newline"
    EOF = "eof"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    start: Location
    end: Location

    def is_op(self, *ops: str) -> bool:
        return self.kind is TokenKind.OP and self.text in ops

    def is_kw(self, *kws: str) -> bool:
        return self.kind is TokenKind.KEYWORD and self.text in kws


def _is_symbol_start(ch: str) -> bool:
    return ch.isalpha() or ch in "._"


def _is_symbol_char(ch: str) -> bool:
    return ch.isalnum() or ch in "._"


def tokenize(source: SourceText) -> list[Token]:
    """Split `source` into tokens; comments vanish, newlines are kept."""
    text = source.content
    tokens: list[Token] = []
    i = 0
    line, col = 1, 1

    def here() -> Location:
        return Location(line, col)

    def advance(n: int) -> None:
        nonlocal i, line, col
        for _ in range(n):
            if text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    def emit(kind: TokenKind, start: Location, start_i: int) -> None:
        tokens.append(Token(kind, text[start_i:i], start, here()))

    while i < len(text):
        ch = text[i]
        start, start_i = here(), i
        if ch == "\n":
            advance(1)
            emit(TokenKind.NEWLINE, start, start_i)
        elif ch in " \t\r":
            advance(1)
        elif ch == "#":
            while i < len(text) and text[i] != "\n":
                advance(1)
        elif ch.isdigit() or (ch == "." and i + 1 < len(text) and text[i + 1].isdigit()):
            while i < len(text) and text[i].isdigit():
                advance(1)
            if i < len(text) and text[i] == ".":
                advance(1)
                while i < len(text) and text[i].isdigit():
                    advance(1)
            if i < len(text) and text[i] in "eE":
                j = i + 1
                if j < len(text) and text[j] in "+-":
                    j += 1
                if j < len(text) and text[j].isdigit():
                    advance(j - i)
                    while i < len(text) and text[i].isdigit():
                        advance(1)
            if i < len(text) and text[i] == "L":
                advance(1)
            emit(TokenKind.NUMBER, start, start_i)
        elif ch in "\"'":
            quote = ch
            advance(1)
            while True:
                if i >= len(text) or text[i] == "\n":
                    raise ParseError("unterminated string", start)
                if text[i] == "\\":
                    if i + 1 >= len(text) or text[i + 1] not in STRING_ESCAPES:
                        raise ParseError("unsupported string escape", here())
                    advance(2)
                elif text[i] == quote:
                    advance(1)
                    break
                else:
                    advance(1)
            emit(TokenKind.STRING, start, start_i)
        elif _is_symbol_start(ch):
            while i < len(text) and _is_symbol_char(text[i]):
                advance(1)
            word = text[start_i:i]
            kind = TokenKind.KEYWORD if word in KEYWORDS else TokenKind.SYMBOL
            emit(kind, start, start_i)
        else:
            for op in OPERATORS:
                if text.startswith(op, i):
                    advance(len(op))
                    emit(TokenKind.OP, start, start_i)
                    break
            else:
                if ch == "%":
                    raise ParseError(f"unsupported %-operator", start)
                raise ParseError(f"unexpected character {ch!r}", start)

    tokens.append(Token(TokenKind.EOF, "", here(), here()))
    return tokens


def string_value(token_text: str) -> str:
    """Decode a STRING token's text into its value."""
    body = token_text[1:-1]
    out = []
    i = 0
    while i < len(body):
        if body[i] == "\\":
            out.append(STRING_ESCAPES[body[i + 1]])
            i += 2
        else:
            out.append(body[i])
            i += 1
    return "".join(out)
