"""Lexer and recursive-descent parser for MiniLang source text."""

from __future__ import annotations

import re

from .diagnostics import PARSE_ERROR, Diagnostic
from .syntax import (
    BUILTINS,
    Assign,
    Binary,
    Block,
    BoolLit,
    Builtin,
    Call,
    ExprStmt,
    Function,
    If,
    IntLit,
    LetDecl,
    ListLit,
    Param,
    Program,
    Return,
    StrLit,
    Unary,
    VarRef,
    While,
)
from .types import BOOL, INT, STR, VOID, ListOf

KEYWORDS = {"fn", "let", "if", "else", "while", "return", "true", "false", "int", "bool", "str"}
INT_MAX = 2**63 - 1

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|//[^\n]*)
  | (?P<int>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<str>"(?:[^"\\\n]|\\.)*")
  | (?P<op>->|==|!=|<=|>=|&&|\|\||[-+*/%<>=!(){}\[\],;:])
    """,
    re.VERBOSE,
)
_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}

# binary operator precedence, loosest first; all left-associative
BINARY_LEVELS = (
    ("||",),
    ("&&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("+", "-"),
    ("*", "/", "%"),
)


class ParseFailure(Exception):
    def __init__(self, message: str, offset: int):
        super().__init__(message)
        self.offset = offset


def tokenize(source: str) -> list:
    """Token list of ``(kind, text, byte_offset)``; ends with an ``eof`` token."""
    tokens = []
    pos = 0
    byte_pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseFailure(f"unexpected character {source[pos]!r}", byte_pos)
        text = m.group()
        kind = m.lastgroup
        if kind == "ident" and text in KEYWORDS:
            kind = "kw"
        if kind != "ws":
            tokens.append((kind, text, byte_pos))
        pos = m.end()
        byte_pos += len(text.encode("utf-8"))
    tokens.append(("eof", "", byte_pos))
    return tokens


def _unescape(raw: str, offset: int) -> str:
    out = []
    i = 0
    while i < len(raw):
        ch = raw[i]
        if ch == "\\":
            nxt = raw[i + 1]
            if nxt not in _ESCAPES:
                raise ParseFailure(f"unknown escape \\{nxt}", offset)
            out.append(_ESCAPES[nxt])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    # token helpers

    def peek(self, ahead=0):
        return self.tokens[min(self.i + ahead, len(self.tokens) - 1)]

    def at(self, text, ahead=0):
        kind, tok, _ = self.peek(ahead)
        return tok == text and kind in ("op", "kw")

    def advance(self):
        tok = self.tokens[self.i]
        if tok[0] != "eof":
            self.i += 1
        return tok

    def fail(self, message):
        kind, text, offset = self.peek()
        found = "end of input" if kind == "eof" else repr(text)
        raise ParseFailure(f"{message}, found {found}", offset)

    def expect(self, text):
        if not self.at(text):
            self.fail(f"expected {text!r}")
        return self.advance()

    def ident(self):
        kind, text, _ = self.peek()
        if kind != "ident":
            self.fail("expected identifier")
        self.advance()
        return text

    # grammar

    def program(self):
        functions = []
        while self.peek()[0] != "eof":
            functions.append(self.function())
        return Program(tuple(functions))

    def function(self):
        self.expect("fn")
        name = self.ident()
        self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                pname = self.ident()
                self.expect(":")
                params.append(Param(pname, self.type_()))
                if not self.at(","):
                    break
                self.advance()
        self.expect(")")
        ret = VOID
        if self.at("->"):
            self.advance()
            ret = self.type_()
        return Function(name, tuple(params), ret, self.block())

    def type_(self):
        if self.at("["):
            self.advance()
            elem = self.type_()
            self.expect("]")
            return ListOf(elem)
        for text, t in (("int", INT), ("bool", BOOL), ("str", STR)):
            if self.at(text):
                self.advance()
                return t
        self.fail("expected type")

    def block(self):
        self.expect("{")
        body = []
        while not self.at("}"):
            if self.peek()[0] == "eof":
                self.fail("expected '}'")
            body.append(self.statement())
        self.advance()
        return tuple(body)

    def statement(self):
        if self.at("let"):
            self.advance()
            name = self.ident()
            self.expect(":")
            t = self.type_()
            self.expect("=")
            init = self.expr()
            self.expect(";")
            return LetDecl(name, t, init)
        if self.at("if"):
            self.advance()
            cond = self.expr()
            then = self.block()
            other = None
            if self.at("else"):
                self.advance()
                other = self.block()
            return If(cond, then, other)
        if self.at("while"):
            self.advance()
            cond = self.expr()
            return While(cond, self.block())
        if self.at("return"):
            self.advance()
            value = None if self.at(";") else self.expr()
            self.expect(";")
            return Return(value)
        if self.at("{"):
            return Block(self.block())
        if self.peek()[0] == "ident" and self.at("=", 1):
            target = self.ident()
            self.advance()
            value = self.expr()
            self.expect(";")
            return Assign(target, value)
        value = self.expr()
        self.expect(";")
        return ExprStmt(value)

    def expr(self, level=0):
        if level == len(BINARY_LEVELS):
            return self.unary()
        ops = BINARY_LEVELS[level]
        lhs = self.expr(level + 1)
        while self.peek()[0] == "op" and self.peek()[1] in ops:
            op = self.advance()[1]
            lhs = Binary(op, lhs, self.expr(level + 1))
        return lhs

    def unary(self):
        if self.at("-") or self.at("!"):
            op = self.advance()[1]
            return Unary(op, self.unary())
        return self.postfix()

    def postfix(self):
        value = self.primary()
        while self.at("["):
            self.advance()
            index = self.expr()
            self.expect("]")
            value = Binary("[]", value, index)
        return value

    def primary(self):
        kind, text, offset = self.peek()
        if kind == "int":
            self.advance()
            value = int(text)
            if value > INT_MAX:
                raise ParseFailure("integer literal out of range", offset)
            return IntLit(value)
        if kind == "str":
            self.advance()
            return StrLit(_unescape(text[1:-1], offset))
        if self.at("true") or self.at("false"):
            self.advance()
            return BoolLit(text == "true")
        if self.at("("):
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        if self.at("["):
            self.advance()
            elements = []
            if not self.at("]"):
                while True:
                    elements.append(self.expr())
                    if not self.at(","):
                        break
                    self.advance()
            self.expect("]")
            return ListLit(tuple(elements))
        if kind == "ident":
            self.advance()
            if not self.at("("):
                return VarRef(text)
            self.advance()
            args = []
            if not self.at(")"):
                while True:
                    args.append(self.expr())
                    if not self.at(","):
                        break
                    self.advance()
            self.expect(")")
            cls = Builtin if text in BUILTINS else Call
            return cls(text, tuple(args))
        self.fail("expected expression")


def parse(source: str):
    """Parse MiniLang source into a :class:`Program`.

    Returns the program on success, otherwise a list holding one ParseError
    diagnostic with a byte offset.
    """
    try:
        return _Parser(tokenize(source)).program()
    except ParseFailure as exc:
        return [Diagnostic(PARSE_ERROR, str(exc), offset=exc.offset)]
    except RecursionError:
        return [Diagnostic(PARSE_ERROR, "nesting too deep", offset=0)]
