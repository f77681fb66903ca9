"""Closure-compiling tree-walking interpreter for MiniLang.

Each syntax node is turned into a Python closure once per program; running
a test then only calls closures. Every statement or expression node
evaluated costs one step of fuel.
"""

from __future__ import annotations

import sys
import uuid as _uuid
from dataclasses import dataclass, field
from typing import Optional

from ..minilang.syntax import (
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

DEFAULT_FUEL = 1_000_000
MAX_CALL_DEPTH = 200
INT_MIN = -(2**63)
INT_MAX = 2**63 - 1
# loop iterations before repeated-state detection starts
MAX_SEQUENCE = 1 << 20
CYCLE_CHECK_AFTER = 256

PASS = "Pass"
ASSERT_FAIL = "AssertFail"
RUNTIME_ERROR = "RuntimeError"
TIMEOUT = "Timeout"

if sys.getrecursionlimit() < 30000:
    sys.setrecursionlimit(30000)


class MiniRuntimeError(Exception):
    pass


class AssertionFailed(Exception):
    pass


class OutOfFuel(Exception):
    pass


class LoopCycle(OutOfFuel):
    """A loop re-entered an identical state, so it can never terminate."""


def render(value) -> str:
    """Canonical text form of a runtime value."""
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        from ..minilang.printer import quote

        return quote(value)
    if isinstance(value, tuple):
        return "[" + ", ".join(render(v) for v in value) + "]"
    raise TypeError(f"not a MiniLang value: {value!r}")


@dataclass
class TestOutcome:
    name: str
    status: str
    steps: int
    message: str = ""

    @property
    def passed(self) -> bool:
        return self.status == PASS


@dataclass
class ExecutionTrace:
    calls: list = field(default_factory=list)
    # (control point sid, ((name, rendered value), ...) sorted by name)
    data: list = field(default_factory=list)


class _Context:
    __slots__ = ("left", "depth", "calls", "data", "hits", "output")

    def __init__(self):
        self.left = 0
        self.depth = 0
        self.calls = None
        self.data = None
        self.hits = None
        self.output = []


class _FnCode:
    __slots__ = ("name", "params", "signature", "body")

    def __init__(self, fn):
        self.name = fn.name
        self.params = tuple(p.name for p in fn.params)
        self.signature = fn.signature()
        self.body = None


def _check_int(v):
    if v < INT_MIN or v > INT_MAX:
        raise MiniRuntimeError("integer overflow")
    return v


def _div(a, b):
    if b == 0:
        raise MiniRuntimeError("division by zero")
    q = abs(a) // abs(b)
    if (a < 0) != (b < 0):
        q = -q
    return _check_int(q)


def _mod(a, b):
    if b == 0:
        raise MiniRuntimeError("division by zero")
    q = abs(a) // abs(b)
    if (a < 0) != (b < 0):
        q = -q
    return a - b * q


def _index(seq, i):
    if i < 0 or i >= len(seq):
        raise MiniRuntimeError(f"index {i} out of bounds for length {len(seq)}")
    return seq[i]


class Interpreter:
    """Compiled form of one program. Not shared between threads."""

    def __init__(self, program: Program, *, coverage: bool = False, trace: bool = False,
                 detect_cycles: Optional[bool] = None):
        self.program = program
        self.coverage = coverage
        self.trace = trace
        if detect_cycles is None:
            # uuid() makes loop states non-replayable
            detect_cycles = not trace and not program.uses_builtin("uuid")
        self.detect_cycles = detect_cycles
        self.ctx = _Context()
        self.codes = {fn.name: _FnCode(fn) for fn in program.functions}
        self._scope_names = {}
        for fn in program.functions:
            self._scopes = [[p.name for p in fn.params]]
            self.codes[fn.name].body = self._body(fn.body, new_scope=False)

    # -- running ------------------------------------------------------------

    def run_test(self, name: str, fuel: int = DEFAULT_FUEL):
        """Run one test function; returns ``(TestOutcome, trace, hit set)``."""
        ctx = self.ctx
        ctx.left = fuel
        ctx.depth = 0
        ctx.output = []
        ctx.calls = [] if self.trace else None
        ctx.data = [] if self.trace else None
        ctx.hits = set() if self.coverage else None
        status, message = PASS, ""
        try:
            self._invoke(self.codes[name], ())
        except AssertionFailed as exc:
            status, message = ASSERT_FAIL, str(exc)
        except MiniRuntimeError as exc:
            status, message = RUNTIME_ERROR, str(exc)
        except LoopCycle:
            status, message = TIMEOUT, "non-terminating loop"
            ctx.left = -1
        except OutOfFuel:
            status, message = TIMEOUT, "fuel exhausted"
        except RecursionError:
            status, message = RUNTIME_ERROR, "stack overflow"
        except MemoryError:
            status, message = RUNTIME_ERROR, "out of memory"
        steps = fuel if ctx.left < 0 else fuel - ctx.left
        trace = ExecutionTrace(ctx.calls, ctx.data) if self.trace else None
        return TestOutcome(name, status, steps, message), trace, ctx.hits

    @property
    def output(self) -> list:
        return self.ctx.output

    def _invoke(self, code, args):
        ctx = self.ctx
        if ctx.depth >= MAX_CALL_DEPTH:
            raise MiniRuntimeError("call depth exceeded")
        if ctx.calls is not None:
            ctx.calls.append(code.signature)
        env = dict(zip(code.params, args))
        ctx.depth += 1
        try:
            result = code.body(env)
        finally:
            ctx.depth -= 1
        return None if result is None else result[0]

    # -- statements -----------------------------------------------------------

    def _body(self, body, new_scope=True):
        if new_scope:
            self._scopes.append([])
        stmts = tuple(self._stmt(s) for s in body)
        if new_scope:
            self._scopes.pop()

        if len(stmts) == 1:
            return stmts[0]

        def run(env):
            for s in stmts:
                r = s(env)
                if r is not None:
                    return r
            return None

        return run

    def _visible(self):
        return tuple(sorted(n for scope in self._scopes for n in scope))

    def _stmt(self, stmt):
        ctx = self.ctx
        sid = self.program.sid_of(stmt)
        hits = self.coverage

        if isinstance(stmt, LetDecl):
            name, init = stmt.name, self._expr(stmt.init)
            self._scopes[-1].append(name)

            def run(env):
                ctx.left -= 1
                if ctx.left < 0:
                    raise OutOfFuel
                env[name] = init(env)

        elif isinstance(stmt, Assign):
            name, value = stmt.target, self._expr(stmt.expr)

            def run(env):
                ctx.left -= 1
                if ctx.left < 0:
                    raise OutOfFuel
                env[name] = value(env)

        elif isinstance(stmt, ExprStmt):
            value = self._expr(stmt.expr)

            def run(env):
                ctx.left -= 1
                if ctx.left < 0:
                    raise OutOfFuel
                value(env)

        elif isinstance(stmt, Return):
            value = None if stmt.expr is None else self._expr(stmt.expr)

            def run(env):
                ctx.left -= 1
                if ctx.left < 0:
                    raise OutOfFuel
                return (None if value is None else value(env),)

        elif isinstance(stmt, If):
            run = self._if(stmt, sid)
        elif isinstance(stmt, While):
            run = self._while(stmt, sid)
        elif isinstance(stmt, Block):
            inner = self._body(stmt.body)

            def run(env):
                ctx.left -= 1
                if ctx.left < 0:
                    raise OutOfFuel
                return inner(env)

        else:
            raise TypeError(f"unknown statement {stmt!r}")

        if not hits:
            return run

        def covered(env, run=run):
            ctx.hits.add(sid)
            return run(env)

        return covered

    def _snapshotter(self, sid):
        names = self._visible()
        ctx = self.ctx

        def snap(env):
            ctx.data.append((sid, tuple((n, render(env[n])) for n in names)))

        return snap

    def _if(self, stmt, sid):
        ctx = self.ctx
        cond = self._expr(stmt.cond)
        snap = self._snapshotter(sid) if self.trace else None
        then = self._body(stmt.then_body)
        other = None if stmt.else_body is None else self._body(stmt.else_body)

        def run(env):
            ctx.left -= 1
            if ctx.left < 0:
                raise OutOfFuel
            if snap is not None:
                snap(env)
            if cond(env):
                return then(env)
            if other is not None:
                return other(env)
            return None

        return run

    def _while(self, stmt, sid):
        ctx = self.ctx
        cond = self._expr(stmt.cond)
        snap = self._snapshotter(sid) if self.trace else None
        body = self._body(stmt.body)
        detect = self.detect_cycles

        def run(env):
            ctx.left -= 1
            if ctx.left < 0:
                raise OutOfFuel
            n = 0
            seen = None
            mark = CYCLE_CHECK_AFTER
            while True:
                if snap is not None:
                    snap(env)
                if not cond(env):
                    return None
                r = body(env)
                if r is not None:
                    return r
                if detect:
                    n += 1
                    if n >= CYCLE_CHECK_AFTER:
                        # the frame is the loop's entire mutable state;
                        # Brent-style: compare against one snapshot taken at powers of two
                        key = tuple(env.items())
                        if n == mark:
                            seen = key
                            mark *= 2
                        elif key == seen:
                            raise LoopCycle

        return run

    # -- expressions ------------------------------------------------------------

    def _expr(self, expr):
        ctx = self.ctx

        if isinstance(expr, (IntLit, BoolLit, StrLit)):
            value = expr.value

            def ev(env):
                ctx.left -= 1
                if ctx.left < 0:
                    raise OutOfFuel
                return value

            return ev

        if isinstance(expr, VarRef):
            name = expr.name

            def ev(env):
                ctx.left -= 1
                if ctx.left < 0:
                    raise OutOfFuel
                return env[name]

            return ev

        if isinstance(expr, ListLit):
            elems = tuple(self._expr(e) for e in expr.elements)

            def ev(env):
                ctx.left -= 1
                if ctx.left < 0:
                    raise OutOfFuel
                return tuple(e(env) for e in elems)

            return ev

        if isinstance(expr, Unary):
            operand = self._expr(expr.operand)
            if expr.op == "-":

                def ev(env):
                    ctx.left -= 1
                    if ctx.left < 0:
                        raise OutOfFuel
                    return _check_int(-operand(env))

            else:

                def ev(env):
                    ctx.left -= 1
                    if ctx.left < 0:
                        raise OutOfFuel
                    return not operand(env)

            return ev

        if isinstance(expr, Binary):
            return self._binary(expr)

        if isinstance(expr, Call):
            code = self.codes[expr.name]
            args = tuple(self._expr(a) for a in expr.args)
            invoke = self._invoke

            def ev(env):
                ctx.left -= 1
                if ctx.left < 0:
                    raise OutOfFuel
                return invoke(code, [a(env) for a in args])

            return ev

        if isinstance(expr, Builtin):
            return self._builtin(expr)

        raise TypeError(f"unknown expression {expr!r}")

    def _binary(self, expr):
        ctx = self.ctx
        op = expr.op
        lhs = self._expr(expr.lhs)
        rhs = self._expr(expr.rhs)

        if op == "&&":

            def ev(env):
                ctx.left -= 1
                if ctx.left < 0:
                    raise OutOfFuel
                return lhs(env) and rhs(env)

            return ev
        if op == "||":

            def ev(env):
                ctx.left -= 1
                if ctx.left < 0:
                    raise OutOfFuel
                return lhs(env) or rhs(env)

            return ev

        fn = {
            "+": lambda a, b: _check_int(a + b),
            "-": lambda a, b: _check_int(a - b),
            "*": lambda a, b: _check_int(a * b),
            "/": _div,
            "%": _mod,
            "<": lambda a, b: a < b,
            "<=": lambda a, b: a <= b,
            ">": lambda a, b: a > b,
            ">=": lambda a, b: a >= b,
            "==": lambda a, b: a == b,
            "!=": lambda a, b: a != b,
            "[]": _index,
        }[op]

        if op == "+":

            def ev(env):
                ctx.left -= 1
                if ctx.left < 0:
                    raise OutOfFuel
                v = lhs(env) + rhs(env)
                if v < INT_MIN or v > INT_MAX:
                    raise MiniRuntimeError("integer overflow")
                return v

            return ev
        if op == "<":

            def ev(env):
                ctx.left -= 1
                if ctx.left < 0:
                    raise OutOfFuel
                return lhs(env) < rhs(env)

            return ev

        def ev(env):
            ctx.left -= 1
            if ctx.left < 0:
                raise OutOfFuel
            return fn(lhs(env), rhs(env))

        return ev

    def _builtin(self, expr):
        ctx = self.ctx
        name = expr.name
        args = tuple(self._expr(a) for a in expr.args)

        if name == "print":
            (a,) = args

            def impl(env):
                ctx.output.append(a(env))

        elif name == "assert":
            (a,) = args
            message = f"assertion failed: {_describe(expr)}"

            def impl(env):
                if not a(env):
                    raise AssertionFailed(message)

        elif name == "len":
            (a,) = args

            def impl(env):
                return len(a(env))

        elif name == "push":
            a, b = args

            def impl(env):
                return _grown(ctx, a(env) + (b(env),))

        elif name == "concat":
            a, b = args

            def impl(env):
                return _grown(ctx, a(env) + b(env))

        elif name == "to_str":
            (a,) = args

            def impl(env):
                return render(a(env))

        elif name == "uuid":

            def impl(env):
                return _uuid.uuid4().hex

        else:
            raise TypeError(f"unknown builtin {name!r}")

        def ev(env):
            ctx.left -= 1
            if ctx.left < 0:
                raise OutOfFuel
            return impl(env)

        return ev


def _grown(ctx, value):
    """Charge fuel for copying a sequence and refuse absurdly large ones."""
    size = len(value)
    if size > MAX_SEQUENCE:
        raise MiniRuntimeError(f"sequence longer than {MAX_SEQUENCE}")
    ctx.left -= size >> 4
    if ctx.left < 0:
        raise OutOfFuel
    return value


def _describe(expr) -> str:
    from ..minilang.printer import format_expr

    return format_expr(expr.args[0])

