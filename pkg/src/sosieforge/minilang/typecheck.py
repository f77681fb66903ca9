"""Static checking: name resolution, typing, and definite-return analysis."""

from __future__ import annotations

from .diagnostics import NAME_ERROR, RETURN_PATH_ERROR, TYPE_ERROR, Diagnostic
from .syntax import (
    BUILTINS,
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
    Program,
    Return,
    StrLit,
    Unary,
    VarRef,
    While,
)
from .types import BOOL, INT, STR, VOID, ListOf

ARITH = {"+", "-", "*", "/", "%"}
ORDER = {"<", "<=", ">", ">="}
EQUALITY = {"==", "!="}
LOGIC = {"&&", "||"}


class _Poison(Exception):
    """An expression already produced a diagnostic; stop checking it."""


def definitely_returns(stmt) -> bool:
    """True when every path through ``stmt`` ends in a Return.

    A block returns if any of its statements does; an If only when both
    branches do; a While never does.
    """
    if isinstance(stmt, Return):
        return True
    if isinstance(stmt, Block):
        return body_returns(stmt.body)
    if isinstance(stmt, If):
        return stmt.else_body is not None and body_returns(stmt.then_body) and body_returns(stmt.else_body)
    return False


def body_returns(body) -> bool:
    return any(definitely_returns(s) for s in body)


class _FunctionChecker:
    def __init__(self, program: Program, fn, functions: dict, diags: list, envs):
        self.program = program
        self.fn = fn
        self.functions = functions
        self.diags = diags
        self.envs = envs
        self.scopes = [{p.name: p.type for p in fn.params}]
        self.ambiguous: set = set()
        self.sid = None

    def error(self, kind, message):
        self.diags.append(Diagnostic(kind, message, function=self.fn.name, sid=self.sid))
        raise _Poison

    def lookup(self, name):
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        return None

    def visible(self) -> dict:
        out = {}
        for scope in self.scopes:
            out.update(scope)
        return out

    # statements

    def body(self, body, new_scope=True):
        if new_scope:
            self.scopes.append({})
        for stmt in body:
            self.stmt(stmt)
        if new_scope:
            self.scopes.pop()

    def stmt(self, stmt):
        self.sid = self.program.sid_of(stmt)
        if self.envs is not None:
            self.envs[self.sid] = self.visible()
        try:
            self._stmt(stmt)
        except _Poison:
            pass

    def _stmt(self, stmt):
        if isinstance(stmt, LetDecl):
            try:
                self.check(stmt.init, stmt.declared_type)
            finally:
                # declared even on failure so later uses do not cascade; after a
                # duplicate the name is ambiguous and its uses are not checked
                if self.lookup(stmt.name) is not None:
                    self.diags.append(
                        Diagnostic(NAME_ERROR, f"variable {stmt.name!r} already declared", self.fn.name, self.sid)
                    )
                    self.ambiguous.add(stmt.name)
                self.scopes[-1][stmt.name] = stmt.declared_type
        elif isinstance(stmt, Assign):
            if stmt.target in self.ambiguous:
                raise _Poison
            target = self.lookup(stmt.target)
            if target is None:
                self.error(NAME_ERROR, f"undeclared variable {stmt.target!r}")
            self.check(stmt.expr, target)
        elif isinstance(stmt, ExprStmt):
            if not isinstance(stmt.expr, (Call, Builtin)):
                self.error(TYPE_ERROR, "expression statement must be a call")
            self.infer(stmt.expr)
        elif isinstance(stmt, Return):
            want = self.fn.return_type
            if stmt.expr is None:
                if want != VOID:
                    self.error(TYPE_ERROR, f"missing return value of type {want}")
            elif want == VOID:
                self.error(TYPE_ERROR, "void function returns a value")
            else:
                self.check(stmt.expr, want)
        elif isinstance(stmt, If):
            self.cond(stmt.cond)
            self.body(stmt.then_body)
            if stmt.else_body is not None:
                self.body(stmt.else_body)
        elif isinstance(stmt, While):
            self.cond(stmt.cond)
            self.body(stmt.body)
        elif isinstance(stmt, Block):
            self.body(stmt.body)

    def cond(self, expr):
        # the condition's own failure must not skip checking the branches
        try:
            self.check(expr, BOOL)
        except _Poison:
            pass

    # expressions

    def check(self, expr, expected):
        got = self.infer(expr, expected)
        if got != expected:
            self.error(TYPE_ERROR, f"expected {expected}, found {got}")
        return got

    def infer(self, expr, expected=None):
        if isinstance(expr, IntLit):
            return INT
        if isinstance(expr, BoolLit):
            return BOOL
        if isinstance(expr, StrLit):
            return STR
        if isinstance(expr, VarRef):
            if expr.name in self.ambiguous:
                raise _Poison
            t = self.lookup(expr.name)
            if t is None:
                self.error(NAME_ERROR, f"undeclared variable {expr.name!r}")
            return t
        if isinstance(expr, ListLit):
            if not expr.elements:
                if isinstance(expected, ListOf):
                    return expected
                self.error(TYPE_ERROR, "cannot infer the type of an empty list")
            hint = expected.element if isinstance(expected, ListOf) else None
            first = self.value(expr.elements[0], hint)
            for e in expr.elements[1:]:
                self.check(e, first)
            return ListOf(first)
        if isinstance(expr, Unary):
            want = INT if expr.op == "-" else BOOL
            self.check(expr.operand, want)
            return want
        if isinstance(expr, Binary):
            return self.binary(expr)
        if isinstance(expr, Call):
            return self.call(expr)
        if isinstance(expr, Builtin):
            return self.builtin(expr)
        raise TypeError(f"unknown expression {expr!r}")

    def value(self, expr, expected=None):
        t = self.infer(expr, expected)
        if t == VOID:
            self.error(TYPE_ERROR, "void value used in an expression")
        return t

    def binary(self, expr):
        op = expr.op
        if op in ARITH:
            self.check(expr.lhs, INT)
            self.check(expr.rhs, INT)
            return INT
        if op in LOGIC:
            self.check(expr.lhs, BOOL)
            self.check(expr.rhs, BOOL)
            return BOOL
        if op in ORDER:
            lt = self.value(expr.lhs)
            if lt not in (INT, STR):
                self.error(TYPE_ERROR, f"cannot order values of type {lt}")
            self.check(expr.rhs, lt)
            return BOOL
        if op in EQUALITY:
            if isinstance(expr.lhs, ListLit) and not expr.lhs.elements:
                rt = self.value(expr.rhs)
                self.check(expr.lhs, rt)
            else:
                lt = self.value(expr.lhs)
                self.check(expr.rhs, lt)
            return BOOL
        if op == "[]":
            container = self.value(expr.lhs)
            self.check(expr.rhs, INT)
            if isinstance(container, ListOf):
                return container.element
            if container == STR:
                return STR
            self.error(TYPE_ERROR, f"cannot index a value of type {container}")
        raise TypeError(f"unknown operator {op!r}")

    def call(self, expr):
        fn = self.functions.get(expr.name)
        if fn is None:
            self.error(NAME_ERROR, f"undefined function {expr.name!r}")
        if fn.is_test:
            self.error(TYPE_ERROR, f"test function {expr.name!r} cannot be called")
        if len(expr.args) != len(fn.params):
            self.error(TYPE_ERROR, f"{expr.name} expects {len(fn.params)} arguments, got {len(expr.args)}")
        for arg, param in zip(expr.args, fn.params):
            self.check(arg, param.type)
        return fn.return_type

    def builtin(self, expr):
        name, args = expr.name, expr.args
        arity = {"print": 1, "assert": 1, "len": 1, "push": 2, "concat": 2, "to_str": 1, "uuid": 0}[name]
        if len(args) != arity:
            self.error(TYPE_ERROR, f"{name} expects {arity} arguments, got {len(args)}")
        if name == "print":
            self.check(args[0], STR)
            return VOID
        if name == "assert":
            self.check(args[0], BOOL)
            return VOID
        if name == "len":
            t = self.value(args[0])
            if not (isinstance(t, ListOf) or t == STR):
                self.error(TYPE_ERROR, f"len of non-sequence type {t}")
            return INT
        if name == "push":
            if isinstance(args[0], ListLit) and not args[0].elements:
                elem = self.value(args[1])
                return ListOf(elem)
            t = self.value(args[0])
            if not isinstance(t, ListOf):
                self.error(TYPE_ERROR, f"push onto non-list type {t}")
            self.check(args[1], t.element)
            return t
        if name == "concat":
            self.check(args[0], STR)
            self.check(args[1], STR)
            return STR
        if name == "to_str":
            t = self.value(args[0])
            if t not in (INT, BOOL):
                self.error(TYPE_ERROR, f"to_str of type {t}")
            return STR
        return STR  # uuid


def _check(program: Program, envs=None) -> list:
    diags: list = []
    functions: dict = {}
    for fn in program.functions:
        if fn.name in functions:
            diags.append(Diagnostic(NAME_ERROR, f"duplicate function {fn.name!r}", function=fn.name))
        elif fn.name in BUILTINS:
            diags.append(Diagnostic(NAME_ERROR, f"function {fn.name!r} shadows a builtin", function=fn.name))
        else:
            functions[fn.name] = fn
        if fn.is_test and (fn.params or fn.return_type != VOID):
            diags.append(Diagnostic(TYPE_ERROR, "test functions take no parameters and return void", function=fn.name))
        seen = set()
        for p in fn.params:
            if p.name in seen:
                diags.append(Diagnostic(NAME_ERROR, f"duplicate parameter {p.name!r}", function=fn.name))
            seen.add(p.name)
    for fn in program.functions:
        checker = _FunctionChecker(program, fn, functions, diags, envs)
        checker.body(fn.body, new_scope=False)
        if fn.return_type != VOID and not body_returns(fn.body):
            diags.append(Diagnostic(RETURN_PATH_ERROR, "missing return on some control path", function=fn.name))
    return diags


def typecheck(program: Program) -> list:
    """Diagnostics for ``program``; an empty list means it is well-formed."""
    return _check(program)


def scope_environments(program: Program) -> dict:
    """Map StatementId -> {name: type} of variables visible just before it."""
    envs: dict = {}
    _check(program, envs)
    return envs
