"""Canonical pretty-printer; ``parse(pretty_print(t)) == t``."""

from __future__ import annotations

from .parser import BINARY_LEVELS
from .syntax import (
    Assign,
    Binary,
    Block,
    BoolLit,
    Builtin,
    Call,
    ExprStmt,
    If,
    IntLit,
    LetDecl,
    ListLit,
    Return,
    StrLit,
    Unary,
    VarRef,
    While,
)
from .types import VOID

INDENT = "    "
_PREC = {op: level for level, ops in enumerate(BINARY_LEVELS) for op in ops}
_UNARY_PREC = len(BINARY_LEVELS)
_POSTFIX_PREC = _UNARY_PREC + 1
_ATOM_PREC = _POSTFIX_PREC + 1


def quote(text: str) -> str:
    escaped = text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{escaped}"'


def _prec(expr) -> int:
    if isinstance(expr, Binary):
        return _POSTFIX_PREC if expr.op == "[]" else _PREC[expr.op]
    if isinstance(expr, Unary):
        return _UNARY_PREC
    return _ATOM_PREC


def _wrap(expr, min_prec: int) -> str:
    text = format_expr(expr)
    return f"({text})" if _prec(expr) < min_prec else text


def format_expr(expr) -> str:
    if isinstance(expr, IntLit):
        return str(expr.value)
    if isinstance(expr, BoolLit):
        return "true" if expr.value else "false"
    if isinstance(expr, StrLit):
        return quote(expr.value)
    if isinstance(expr, VarRef):
        return expr.name
    if isinstance(expr, ListLit):
        return "[" + ", ".join(format_expr(e) for e in expr.elements) + "]"
    if isinstance(expr, (Call, Builtin)):
        return f"{expr.name}(" + ", ".join(format_expr(a) for a in expr.args) + ")"
    if isinstance(expr, Unary):
        return expr.op + _wrap(expr.operand, _UNARY_PREC)
    if isinstance(expr, Binary):
        if expr.op == "[]":
            return f"{_wrap(expr.lhs, _POSTFIX_PREC)}[{format_expr(expr.rhs)}]"
        p = _PREC[expr.op]
        # left-associative: the right operand needs strictly tighter binding
        return f"{_wrap(expr.lhs, p)} {expr.op} {_wrap(expr.rhs, p + 1)}"
    raise TypeError(f"not an expression: {expr!r}")


def _body(body, depth: int, out: list) -> None:
    for stmt in body:
        _stmt(stmt, depth, out)


def _stmt(stmt, depth: int, out: list) -> None:
    pad = INDENT * depth
    if isinstance(stmt, LetDecl):
        out.append(f"{pad}let {stmt.name}: {stmt.declared_type} = {format_expr(stmt.init)};")
    elif isinstance(stmt, Assign):
        out.append(f"{pad}{stmt.target} = {format_expr(stmt.expr)};")
    elif isinstance(stmt, ExprStmt):
        out.append(f"{pad}{format_expr(stmt.expr)};")
    elif isinstance(stmt, Return):
        out.append(f"{pad}return;" if stmt.expr is None else f"{pad}return {format_expr(stmt.expr)};")
    elif isinstance(stmt, If):
        out.append(f"{pad}if {format_expr(stmt.cond)} {{")
        _body(stmt.then_body, depth + 1, out)
        if stmt.else_body is not None:
            out.append(f"{pad}}} else {{")
            _body(stmt.else_body, depth + 1, out)
        out.append(f"{pad}}}")
    elif isinstance(stmt, While):
        out.append(f"{pad}while {format_expr(stmt.cond)} {{")
        _body(stmt.body, depth + 1, out)
        out.append(f"{pad}}}")
    elif isinstance(stmt, Block):
        out.append(f"{pad}{{")
        _body(stmt.body, depth + 1, out)
        out.append(f"{pad}}}")
    else:
        raise TypeError(f"not a statement: {stmt!r}")


def format_stmt(stmt, depth: int = 0) -> str:
    out: list = []
    _stmt(stmt, depth, out)
    return "\n".join(out)


def format_function(fn) -> str:
    params = ", ".join(f"{p.name}: {p.type}" for p in fn.params)
    ret = "" if fn.return_type == VOID else f" -> {fn.return_type}"
    out = [f"fn {fn.name}({params}){ret} {{"]
    _body(fn.body, 1, out)
    out.append("}")
    return "\n".join(out)


def pretty_print(program) -> str:
    return "\n\n".join(format_function(fn) for fn in program.functions) + "\n"
