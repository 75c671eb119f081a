"""Shared tokenizer and expression parser.

One lexer and one Pratt parser back three front ends: the human
polynomial grammar (juxtaposition allowed, no real literals), the wire
value grammar (real literals, no juxtaposition), and the session command
language (both).  The parser builds a small untyped AST; the consumers
decide what names, calls and operators mean.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ExprSyntaxError

_PUNCT2 = ("==",)
_PUNCT1 = "()[],+-*/^="
_NAME_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_NAME_CONT = _NAME_START | set("0123456789")
_ESCAPES = {'"': '"', "\\": "\\", "n": "\n"}


@dataclass(frozen=True)
class Token:
    kind: str  # NUM, REAL, NAME, STR, or the punctuation itself
    value: object
    pos: int


def tokenize(source: str, reals: bool = True) -> list[Token]:
    """Split `source` into tokens.

    With `reals` false, `12.5` and `1e3` are not lexed as floating
    literals; a trailing `e` stays a NAME so `2e` can mean 2*e in a
    polynomial context.
    """
    toks = []
    i, n = 0, len(source)
    while i < n:
        c = source[i]
        if c in " \t\r\n":
            i += 1
            continue
        if source.startswith("==", i):
            toks.append(Token("==", "==", i))
            i += 2
            continue
        if c in _PUNCT1:
            toks.append(Token(c, c, i))
            i += 1
            continue
        if c.isdigit():
            start = i
            while i < n and source[i].isdigit():
                i += 1
            is_real = False
            if reals and i < n and source[i] == "." and i + 1 < n and source[i + 1].isdigit():
                is_real = True
                i += 1
                while i < n and source[i].isdigit():
                    i += 1
            if reals and i < n and source[i] in "eE":
                j = i + 1
                if j < n and source[j] in "+-":
                    j += 1
                if j < n and source[j].isdigit():
                    is_real = True
                    i = j
                    while i < n and source[i].isdigit():
                        i += 1
            text = source[start:i]
            if is_real:
                toks.append(Token("REAL", float(text), start))
            else:
                toks.append(Token("NUM", int(text), start))
            continue
        if c in _NAME_START:
            start = i
            while i < n and source[i] in _NAME_CONT:
                i += 1
            toks.append(Token("NAME", source[start:i], start))
            continue
        if c == '"':
            start = i
            i += 1
            parts = []
            while True:
                if i >= n:
                    raise ExprSyntaxError("unterminated text literal", start, '"')
                ch = source[i]
                if ch == '"':
                    i += 1
                    break
                if ch == "\\":
                    if i + 1 >= n or source[i + 1] not in _ESCAPES:
                        raise ExprSyntaxError("bad escape", i, '\\" \\\\ or \\n')
                    parts.append(_ESCAPES[source[i + 1]])
                    i += 2
                else:
                    parts.append(ch)
                    i += 1
            toks.append(Token("STR", "".join(parts), start))
            continue
        raise ExprSyntaxError(f"unexpected character {c!r}", i)
    return toks


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Num:
    value: object  # int or float
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Str:
    value: str
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Name:
    ident: str
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ListNode:
    items: tuple
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Call:
    tag: str
    args: tuple
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Neg:
    operand: object
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Bin:
    op: str  # + - * / ^ ==
    left: object
    right: object
    pos: int = field(default=0, compare=False)


_ATOM_STARTS = ("NUM", "REAL", "NAME", "STR", "(", "[")


class _Parser:
    def __init__(self, tokens, source_len, juxt, calls="always"):
        self.toks = tokens
        self.i = 0
        self.end = source_len
        self.juxt = juxt
        self.calls = calls  # "always" | "adjacent" | "never"

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self, expected=None):
        tok = self.peek()
        if tok is None:
            raise ExprSyntaxError("unexpected end of input", self.end, expected)
        self.i += 1
        return tok

    def expect(self, kind):
        tok = self.peek()
        if tok is None or tok.kind != kind:
            pos = tok.pos if tok else self.end
            raise ExprSyntaxError("unexpected token", pos, kind)
        return self.next()

    def parse_expr(self):
        return self.parse_eq()

    def parse_eq(self):
        left = self.parse_sum()
        while (tok := self.peek()) is not None and tok.kind == "==":
            self.next()
            right = self.parse_sum()
            left = Bin("==", left, right, tok.pos)
        return left

    def parse_sum(self):
        tok = self.peek()
        if tok is not None and tok.kind in "+-":
            self.next()
            operand = self.parse_product()
            left = operand if tok.kind == "+" else Neg(operand, tok.pos)
        else:
            left = self.parse_product()
        while (tok := self.peek()) is not None and tok.kind in "+-":
            self.next()
            right = self.parse_product()
            left = Bin(tok.kind, left, right, tok.pos)
        return left

    def parse_product(self):
        left = self.parse_unary()
        while True:
            tok = self.peek()
            if tok is not None and tok.kind in "*/":
                self.next()
                right = self.parse_unary()
                left = Bin(tok.kind, left, right, tok.pos)
            elif self.juxt and tok is not None and tok.kind in ("NUM", "REAL", "NAME", "("):
                right = self.parse_unary()
                left = Bin("*", left, right, tok.pos)
            else:
                return left

    def parse_unary(self):
        tok = self.peek()
        if tok is not None and tok.kind == "-":
            self.next()
            return Neg(self.parse_unary(), tok.pos)
        return self.parse_power()

    def parse_power(self):
        base = self.parse_atom()
        tok = self.peek()
        if tok is not None and tok.kind == "^":
            self.next()
            exponent = self.parse_unary()  # right associative
            return Bin("^", base, exponent, tok.pos)
        return base

    def parse_atom(self):
        tok = self.next("a value")
        if tok.kind == "NUM" or tok.kind == "REAL":
            return Num(tok.value, tok.pos)
        if tok.kind == "STR":
            return Str(tok.value, tok.pos)
        if tok.kind == "NAME":
            nxt = self.peek()
            if nxt is not None and nxt.kind == "(" and self._is_call(tok, nxt):
                self.next()
                args = self.parse_seq(")")
                return Call(tok.value, tuple(args), tok.pos)
            return Name(tok.value, tok.pos)
        if tok.kind == "(":
            inner = self.parse_expr()
            self.expect(")")
            return inner
        if tok.kind == "[":
            self.i -= 1
            self.next()
            items = self.parse_seq("]")
            return ListNode(tuple(items), tok.pos)
        raise ExprSyntaxError("unexpected token", tok.pos, "a value")

    def _is_call(self, name_tok, paren_tok):
        if self.calls == "always":
            return True
        if self.calls == "adjacent":
            # `gb(I)` is a call, `x (x+1)` is juxtaposed multiplication
            return paren_tok.pos == name_tok.pos + len(name_tok.value)
        return False

    def parse_seq(self, closer):
        items = []
        tok = self.peek()
        if tok is not None and tok.kind == closer:
            self.next()
            return items
        while True:
            items.append(self.parse_expr())
            tok = self.next(f"',' or '{closer}'")
            if tok.kind == closer:
                return items
            if tok.kind != ",":
                raise ExprSyntaxError("unexpected token", tok.pos, f"',' or '{closer}'")


def parse_expression(source: str, *, reals: bool = True, juxt: bool = False,
                     calls: str = "always"):
    """Parse a single expression covering the whole source."""
    toks = tokenize(source, reals=reals)
    parser = _Parser(toks, len(source), juxt, calls)
    node = parser.parse_expr()
    trailing = parser.peek()
    if trailing is not None:
        raise ExprSyntaxError("trailing input", trailing.pos, "end of input")
    return node


def free_names(node) -> set[str]:
    """Names used as variables (call tags and call arguments excluded)."""
    out: set[str] = set()
    _walk_names(node, out)
    return out


def _walk_names(node, out):
    if isinstance(node, Name):
        out.add(node.ident)
    elif isinstance(node, Neg):
        _walk_names(node.operand, out)
    elif isinstance(node, Bin):
        _walk_names(node.left, out)
        _walk_names(node.right, out)
    elif isinstance(node, ListNode):
        for item in node.items:
            _walk_names(item, out)
    # Call arguments are scoped by the callee, not the statement.
