"""Recursive-descent / precedence-climbing parser for the R subset.

Newline handling follows R: inside `(`, `[`, and `[[` groups newlines are
plain whitespace; at the top level and inside `{}` blocks a newline ends the
current expression unless an operand is still pending (e.g. after a trailing
binary operator such as `|>` or `+`).
"""
from __future__ import annotations

from rslice.source import Location, ParseError, Range, SourceText
from rslice.syntax.ast import Node, NodeKind
from rslice.syntax.tokens import Token, TokenKind, tokenize

# Infix binding powers, tightest first. Unary - and ! bind at UNARY_BP.
NAMESPACE_BP = 110
POSTFIX_BP = 100
UNARY_BP = 90
_INFIX = {
    "^": (85, "right"),
    "*": (80, "left"), "/": (80, "left"),
    "+": (75, "left"), "-": (75, "left"),
    ":": (70, "left"),
    "<": (60, "left"), ">": (60, "left"), "<=": (60, "left"),
    ">=": (60, "left"), "==": (60, "left"), "!=": (60, "left"),
    "&": (55, "left"), "&&": (55, "left"),
    "|": (50, "left"), "||": (50, "left"),
    "|>": (45, "left"), "%>%": (45, "left"),
    "<-": (20, "right"), "<<-": (20, "right"), "=": (20, "right"),
    "->": (15, "left"),
}

class _Parser:
    def __init__(self, tokens: list[Token], source: SourceText):
        self.tokens = tokens
        self.pos = 0
        self.source = source
        self.modes: list[str] = []  # 'paren' | 'brace'

    # -- token plumbing -------------------------------------------------

    def _newlines_significant(self) -> bool:
        return not self.modes or self.modes[-1] == "brace"

    def _peek_index(self, pos: int | None = None) -> int:
        pos = self.pos if pos is None else pos
        if not self._newlines_significant():
            while self.tokens[pos].kind is TokenKind.NEWLINE:
                pos += 1
        return pos

    def peek(self) -> Token:
        return self.tokens[self._peek_index()]

    def peek2(self) -> Token:
        return self.tokens[self._peek_index(self._peek_index() + 1)]

    def advance(self) -> Token:
        idx = self._peek_index()
        self.pos = idx + 1
        return self.tokens[idx]

    def skip_newlines(self) -> None:
        while self.tokens[self.pos].kind is TokenKind.NEWLINE:
            self.pos += 1

    def expect_op(self, op: str) -> Token:
        tok = self.peek()
        if not tok.is_op(op):
            raise ParseError(f"unexpected {tok.text or 'end of input'!r}", tok.start, expected=op)
        return self.advance()

    def at_terminator(self, tok: Token) -> bool:
        return (
            tok.kind in (TokenKind.EOF, TokenKind.NEWLINE)
            or tok.is_op(")", "]", "}", ",", ";")
            or tok.is_kw("else", "in")
        )

    # -- entry points ---------------------------------------------------

    def parse_program(self) -> Node:
        statements = self.parse_statements(stop_op=None)
        start = Location(1, 1)
        end = self.tokens[-1].end
        return Node(NodeKind.EXPRLIST, "", Range(start, end), statements)

    def parse_statements(self, stop_op: str | None) -> list[Node]:
        statements = []
        while True:
            while self.tokens[self.pos].kind is TokenKind.NEWLINE or self.tokens[self.pos].is_op(";"):
                self.pos += 1
            tok = self.tokens[self.pos]
            if tok.kind is TokenKind.EOF or (stop_op and tok.is_op(stop_op)):
                break
            if tok.is_op(")", "]", "}"):
                raise ParseError(f"unbalanced {tok.text!r}", tok.start)
            statements.append(self.parse_expr(0))
        return statements

    # -- expressions ----------------------------------------------------

    def parse_expr(self, min_bp: int) -> Node:
        left = self.parse_prefix()
        while True:
            tok = self.peek()
            if self.at_terminator(tok):
                break
            if tok.is_op("::", ":::"):
                if NAMESPACE_BP < min_bp:
                    break
                left = self.parse_namespace(left)
                continue
            if tok.is_op("(", "$", "[[", "["):
                if POSTFIX_BP < min_bp:
                    break
                left = self.parse_postfix(left)
                continue
            if tok.kind is TokenKind.OP and tok.text in _INFIX:
                bp, assoc = _INFIX[tok.text]
                if bp < min_bp:
                    break
                self.advance()
                self.skip_newlines()
                right = self.parse_expr(bp if assoc == "right" else bp + 1)
                left = self.make_infix(tok.text, left, right)
                continue
            raise ParseError(f"unexpected {tok.text!r}", tok.start)
        return left

    def make_infix(self, op: str, left: Node, right: Node) -> Node:
        loc = Range(left.location.start, right.location.end)
        if op in ("<-", "<<-", "="):
            return Node(NodeKind.ASSIGNMENT, op, loc, [left, right], op=op)
        if op == "->":
            return Node(NodeKind.RIGHT_ASSIGN, op, loc, [left, right], op=op)
        if op in ("|>", "%>%"):
            return Node(NodeKind.PIPE, op, loc, [left, right], op=op)
        return Node(NodeKind.BINARY, op, loc, [left, right], op=op)

    def parse_namespace(self, left: Node) -> Node:
        op = self.advance()
        name = self.peek()
        if name.kind is not TokenKind.SYMBOL:
            raise ParseError("expected a name after namespace operator", name.start)
        self.advance()
        right = Node(NodeKind.SYMBOL, name.text, Range(name.start, name.end))
        return Node(
            NodeKind.NAMESPACE, op.text,
            Range(left.location.start, right.location.end),
            [left, right], op=op.text,
        )

    def parse_postfix(self, left: Node) -> Node:
        tok = self.advance()
        if tok.is_op("("):
            self.modes.append("paren")
            args = self.parse_arguments()
            close = self.expect_op(")")
            self.modes.pop()
            lexeme = callee_name(left)
            return Node(NodeKind.CALL, lexeme, Range(left.location.start, close.end), [left, *args])
        if tok.is_op("$"):
            field = self.peek()
            if field.kind is TokenKind.SYMBOL:
                child = Node(NodeKind.SYMBOL, field.text, Range(field.start, field.end))
            elif field.kind is TokenKind.STRING:
                child = Node(NodeKind.STRING, field.text, Range(field.start, field.end))
            else:
                raise ParseError("expected a field name after $", field.start)
            self.advance()
            return Node(
                NodeKind.INDEX, "$",
                Range(left.location.start, child.location.end),
                [left, child], op="$",
            )
        # '[[' closes with two ']' tokens, '[' with one
        self.modes.append("paren")
        subscripts = [self.parse_expr(0)]
        while self.peek().is_op(","):
            self.advance()
            subscripts.append(self.parse_expr(0))
        close = self.expect_op("]")
        if tok.text == "[[":
            close = self.expect_op("]")
        self.modes.pop()
        return Node(
            NodeKind.INDEX, tok.text,
            Range(left.location.start, close.end),
            [left, *subscripts], op=tok.text,
        )

    def parse_arguments(self) -> list[Node]:
        args: list[Node] = []
        if self.peek().is_op(")"):
            return args
        while True:
            args.append(self.parse_argument())
            if self.peek().is_op(","):
                self.advance()
                continue
            return args

    def parse_argument(self) -> Node:
        tok = self.peek()
        if tok.kind in (TokenKind.SYMBOL, TokenKind.STRING):
            after = self.peek2()
            if after.is_op("="):
                self.advance()
                self.advance()
                self.skip_newlines()
                value = self.parse_expr(0)
                name = tok.text if tok.kind is TokenKind.SYMBOL else tok.text[1:-1]
                return Node(
                    NodeKind.ARGUMENT, name,
                    Range(tok.start, value.location.end),
                    [value], name=name,
                )
        value = self.parse_expr(0)
        return Node(NodeKind.ARGUMENT, "", value.location, [value])

    # -- prefix / primary -----------------------------------------------

    def parse_prefix(self) -> Node:
        self.skip_newlines()
        tok = self.peek()
        if tok.kind is TokenKind.EOF:
            raise ParseError("unexpected end of input", tok.start, expected="expression")
        if tok.kind is TokenKind.NUMBER:
            self.advance()
            return Node(NodeKind.NUMBER, tok.text, Range(tok.start, tok.end))
        if tok.kind is TokenKind.STRING:
            self.advance()
            return Node(NodeKind.STRING, tok.text, Range(tok.start, tok.end))
        if tok.kind is TokenKind.SYMBOL:
            self.advance()
            return Node(NodeKind.SYMBOL, tok.text, Range(tok.start, tok.end))
        if tok.kind is TokenKind.KEYWORD:
            return self.parse_keyword(tok)
        if tok.is_op("-", "!"):
            self.advance()
            operand = self.parse_expr(UNARY_BP)
            return Node(
                NodeKind.UNARY, tok.text,
                Range(tok.start, operand.location.end),
                [operand], op=tok.text,
            )
        if tok.is_op("("):
            self.advance()
            self.modes.append("paren")
            inner = self.parse_expr(0)
            self.expect_op(")")
            self.modes.pop()
            return inner
        if tok.is_op("{"):
            return self.parse_block()
        raise ParseError(f"unexpected {tok.text!r}", tok.start, expected="expression")

    def parse_block(self) -> Node:
        open_tok = self.expect_op("{")
        self.modes.append("brace")
        statements = self.parse_statements(stop_op="}")
        close = self.expect_op("}")
        self.modes.pop()
        return Node(NodeKind.EXPRLIST, "", Range(open_tok.start, close.end), statements, braced=True)

    def parse_keyword(self, tok: Token) -> Node:
        if tok.is_kw("TRUE", "FALSE"):
            self.advance()
            return Node(NodeKind.LOGICAL, tok.text, Range(tok.start, tok.end))
        if tok.is_kw("NULL"):
            self.advance()
            return Node(NodeKind.NULL, tok.text, Range(tok.start, tok.end))
        if tok.is_kw("break"):
            self.advance()
            return Node(NodeKind.BREAK, tok.text, Range(tok.start, tok.end))
        if tok.is_kw("next"):
            self.advance()
            return Node(NodeKind.NEXT, tok.text, Range(tok.start, tok.end))
        if tok.is_kw("if"):
            return self.parse_if(tok)
        if tok.is_kw("for"):
            return self.parse_for(tok)
        if tok.is_kw("while"):
            return self.parse_while(tok)
        if tok.is_kw("repeat"):
            self.advance()
            body = self.parse_expr(0)
            return Node(NodeKind.REPEAT, "repeat", Range(tok.start, body.location.end), [body])
        if tok.is_kw("function"):
            return self.parse_function(tok)
        raise ParseError(f"unexpected keyword {tok.text!r}", tok.start)

    def parse_paren_header(self) -> Node:
        self.expect_op("(")
        self.modes.append("paren")
        inner = self.parse_expr(0)
        self.expect_op(")")
        self.modes.pop()
        return inner

    def parse_if(self, tok: Token) -> Node:
        self.advance()
        cond = self.parse_paren_header()
        then = self.parse_expr(0)
        children = [cond, then]
        end = then.location.end
        saved = self.pos
        self.skip_newlines()
        if self.peek().is_kw("else"):
            self.advance()
            alt = self.parse_expr(0)
            children.append(alt)
            end = alt.location.end
        else:
            self.pos = saved
        return Node(NodeKind.IF, "if", Range(tok.start, end), children)

    def parse_for(self, tok: Token) -> Node:
        self.advance()
        self.expect_op("(")
        self.modes.append("paren")
        var_tok = self.peek()
        if var_tok.kind is not TokenKind.SYMBOL:
            raise ParseError("expected a loop variable", var_tok.start)
        self.advance()
        var = Node(NodeKind.SYMBOL, var_tok.text, Range(var_tok.start, var_tok.end))
        kw = self.peek()
        if not kw.is_kw("in"):
            raise ParseError("expected 'in'", kw.start, expected="in")
        self.advance()
        seq = self.parse_expr(0)
        self.expect_op(")")
        self.modes.pop()
        body = self.parse_expr(0)
        return Node(NodeKind.FOR, "for", Range(tok.start, body.location.end), [var, seq, body])

    def parse_while(self, tok: Token) -> Node:
        self.advance()
        cond = self.parse_paren_header()
        body = self.parse_expr(0)
        return Node(NodeKind.WHILE, "while", Range(tok.start, body.location.end), [cond, body])

    def parse_function(self, tok: Token) -> Node:
        self.advance()
        self.expect_op("(")
        self.modes.append("paren")
        params: list[Node] = []
        if not self.peek().is_op(")"):
            while True:
                name_tok = self.peek()
                if name_tok.kind is not TokenKind.SYMBOL:
                    raise ParseError("expected a parameter name", name_tok.start)
                self.advance()
                children = []
                end = name_tok.end
                if self.peek().is_op("="):
                    self.advance()
                    default = self.parse_expr(0)
                    children.append(default)
                    end = default.location.end
                params.append(Node(
                    NodeKind.PARAMETER, name_tok.text,
                    Range(name_tok.start, end), children, name=name_tok.text,
                ))
                if self.peek().is_op(","):
                    self.advance()
                    continue
                break
        self.expect_op(")")
        self.modes.pop()
        body = self.parse_expr(0)
        return Node(
            NodeKind.FUNCTION, "function",
            Range(tok.start, body.location.end), [*params, body],
        )


def callee_name(callee: Node) -> str:
    if callee.kind is NodeKind.SYMBOL:
        return callee.lexeme
    if callee.kind is NodeKind.NAMESPACE:
        return callee.children[1].lexeme
    return ""


def parse(source: SourceText | str) -> Node:
    """Parse `source` into a syntax tree; raises ParseError on bad input."""
    if isinstance(source, str):
        source = SourceText(source)
    return _Parser(tokenize(source), source).parse_program()
