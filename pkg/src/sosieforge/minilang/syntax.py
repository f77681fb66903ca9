"""Abstract syntax of MiniLang.

Nodes are immutable and compare structurally. Statement identity is not
stored on the nodes: a statement's id is its pre-order index over the whole
program, and :class:`Program` maintains the mapping lazily.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Optional, Union

from .types import StaticType, VOID

# -- expressions -------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class IntLit:
    value: int


@dataclass(frozen=True, slots=True)
class BoolLit:
    value: bool


@dataclass(frozen=True, slots=True)
class StrLit:
    value: str


@dataclass(frozen=True, slots=True)
class ListLit:
    elements: tuple


@dataclass(frozen=True, slots=True)
class VarRef:
    name: str


@dataclass(frozen=True, slots=True)
class Unary:
    op: str
    operand: Expr


@dataclass(frozen=True, slots=True)
class Binary:
    # op "[]" is indexing: lhs[rhs]
    op: str
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True, slots=True)
class Call:
    name: str
    args: tuple


@dataclass(frozen=True, slots=True)
class Builtin:
    name: str
    args: tuple


Expr = Union[IntLit, BoolLit, StrLit, ListLit, VarRef, Unary, Binary, Call, Builtin]

BUILTINS = ("print", "assert", "len", "push", "concat", "to_str", "uuid")

# -- statements --------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class LetDecl:
    name: str
    declared_type: StaticType
    init: Expr


@dataclass(frozen=True, slots=True)
class Assign:
    target: str
    expr: Expr


@dataclass(frozen=True, slots=True)
class ExprStmt:
    expr: Expr


@dataclass(frozen=True, slots=True)
class If:
    cond: Expr
    then_body: tuple
    else_body: Optional[tuple] = None


@dataclass(frozen=True, slots=True)
class While:
    cond: Expr
    body: tuple


@dataclass(frozen=True, slots=True)
class Return:
    expr: Optional[Expr] = None


@dataclass(frozen=True, slots=True)
class Block:
    body: tuple


Stmt = Union[LetDecl, Assign, ExprStmt, If, While, Return, Block]

STATEMENT_KINDS = {
    LetDecl: "let",
    Assign: "assign",
    ExprStmt: "expr",
    If: "if",
    While: "while",
    Return: "return",
    Block: "block",
}


def stmt_kind(stmt: Stmt) -> str:
    return STATEMENT_KINDS[type(stmt)]


def child_bodies(stmt: Stmt) -> tuple:
    """Statement lists directly nested in ``stmt``, in source order."""
    if isinstance(stmt, If):
        return (stmt.then_body,) if stmt.else_body is None else (stmt.then_body, stmt.else_body)
    if isinstance(stmt, While):
        return (stmt.body,)
    if isinstance(stmt, Block):
        return (stmt.body,)
    return ()


def with_bodies(stmt: Stmt, bodies: tuple) -> Stmt:
    """Copy of a compound statement with its nested statement lists replaced."""
    if isinstance(stmt, If):
        return If(stmt.cond, bodies[0], bodies[1] if len(bodies) > 1 else None)
    if isinstance(stmt, While):
        return While(stmt.cond, bodies[0])
    if isinstance(stmt, Block):
        return Block(bodies[0])
    return stmt


# -- program -----------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Param:
    name: str
    type: StaticType


@dataclass(frozen=True, slots=True)
class Function:
    name: str
    params: tuple
    return_type: StaticType
    body: tuple

    @property
    def is_test(self) -> bool:
        return self.name.startswith("test_")

    def signature(self) -> str:
        params = ",".join(str(p.type) for p in self.params)
        return f"{self.name}({params})->{self.return_type}"


@dataclass(frozen=True, eq=False)
class StatementInfo:
    sid: int
    stmt: Stmt
    function: Function
    depth: int


@dataclass(frozen=True)
class Program:
    """A whole MiniLang program (the syntax tree)."""

    functions: tuple

    def __reduce__(self):
        # the cached id() index must not travel through pickle
        return (Program, (self.functions,))

    @cached_property
    def statements(self) -> list:
        """Pre-order listing of every statement; index == StatementId."""
        out: list = []
        for fn in self.functions:
            _walk(fn.body, fn, 0, out)
        return out

    @cached_property
    def _sid_by_node(self) -> dict:
        return {id(info.stmt): info.sid for info in self.statements}

    def sid_of(self, stmt: Stmt) -> int:
        return self._sid_by_node[id(stmt)]

    def stmt(self, sid: int) -> Stmt:
        return self.statements[sid].stmt

    def function(self, name: str) -> Optional[Function]:
        for fn in self.functions:
            if fn.name == name:
                return fn
        return None

    @property
    def test_names(self) -> list:
        return sorted(fn.name for fn in self.functions if fn.is_test)

    @cached_property
    def app_sids(self) -> list:
        """Ids of statements outside test functions (the transformable code)."""
        return [info.sid for info in self.statements if not info.function.is_test]

    def uses_builtin(self, name: str) -> bool:
        return any(
            isinstance(e, Builtin) and e.name == name
            for fn in self.functions
            for s in fn.body
            for e in iter_exprs(s)
        )


def _walk(body, fn, depth, out):
    for stmt in body:
        out.append(StatementInfo(len(out), stmt, fn, depth))
        for sub in child_bodies(stmt):
            _walk(sub, fn, depth + 1, out)


def iter_stmts(stmt: Stmt) -> Iterator[Stmt]:
    """``stmt`` and every statement nested in it, pre-order."""
    yield stmt
    for body in child_bodies(stmt):
        for s in body:
            yield from iter_stmts(s)


def own_exprs(stmt: Stmt) -> tuple:
    """Expressions belonging to ``stmt`` itself, not to nested statements."""
    if isinstance(stmt, LetDecl):
        return (stmt.init,)
    if isinstance(stmt, (Assign, ExprStmt)):
        return (stmt.expr,)
    if isinstance(stmt, (If, While)):
        return (stmt.cond,)
    if isinstance(stmt, Return):
        return () if stmt.expr is None else (stmt.expr,)
    return ()


def sub_exprs(expr: Expr) -> tuple:
    if isinstance(expr, ListLit):
        return expr.elements
    if isinstance(expr, Unary):
        return (expr.operand,)
    if isinstance(expr, Binary):
        return (expr.lhs, expr.rhs)
    if isinstance(expr, (Call, Builtin)):
        return expr.args
    return ()


def walk_expr(expr: Expr) -> Iterator[Expr]:
    yield expr
    for sub in sub_exprs(expr):
        yield from walk_expr(sub)


def iter_exprs(stmt: Stmt) -> Iterator[Expr]:
    """Every expression node under ``stmt`` (nested statements included)."""
    for s in iter_stmts(stmt):
        for e in own_exprs(s):
            yield from walk_expr(e)


def is_void(t: StaticType) -> bool:
    return t == VOID
