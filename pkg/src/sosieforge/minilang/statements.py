"""Statement addressing, free-variable analysis and tree rewriting."""

from __future__ import annotations

from .syntax import (
    Assign,
    Binary,
    Builtin,
    Call,
    LetDecl,
    ListLit,
    Program,
    Unary,
    VarRef,
    child_bodies,
    own_exprs,
    stmt_kind,
    sub_exprs,
    with_bodies,
    Function,
)


def enumerate_statements(program: Program) -> list:
    """``(sid, kind, function name)`` for every statement, in pre-order."""
    return [(info.sid, stmt_kind(info.stmt), info.function.name) for info in program.statements]


def _expr_names(expr, out: list) -> None:
    if isinstance(expr, VarRef):
        out.append(expr.name)
        return
    for sub in sub_exprs(expr):
        _expr_names(sub, out)


def _free(body, declared: set, out: list) -> None:
    for stmt in body:
        names: list = []
        for e in own_exprs(stmt):
            _expr_names(e, names)
        if isinstance(stmt, Assign):
            names.append(stmt.target)
        for n in names:
            if n not in declared and n not in out:
                out.append(n)
        if isinstance(stmt, LetDecl):
            declared.add(stmt.name)
        for sub in child_bodies(stmt):
            _free(sub, set(declared), out)


def free_variables(stmt) -> list:
    """Names read or written by ``stmt`` that it does not itself declare.

    Ordered by first occurrence. A LetDecl's own variable is declared by the
    statement and therefore not free.
    """
    out: list = []
    _free((stmt,), set(), out)
    return out


def declared_names(stmt) -> list:
    from .syntax import iter_stmts

    return [s.name for s in iter_stmts(stmt) if isinstance(s, LetDecl)]


# -- renaming ------------------------------------------------------------------


def _rename_expr(expr, mapping: dict):
    if isinstance(expr, VarRef):
        return VarRef(mapping.get(expr.name, expr.name))
    if isinstance(expr, ListLit):
        return ListLit(tuple(_rename_expr(e, mapping) for e in expr.elements))
    if isinstance(expr, Unary):
        return Unary(expr.op, _rename_expr(expr.operand, mapping))
    if isinstance(expr, Binary):
        return Binary(expr.op, _rename_expr(expr.lhs, mapping), _rename_expr(expr.rhs, mapping))
    if isinstance(expr, (Call, Builtin)):
        return type(expr)(expr.name, tuple(_rename_expr(a, mapping) for a in expr.args))
    return expr


def _rename_body(body, mapping: dict) -> tuple:
    out = []
    for stmt in body:
        out.append(_rename_stmt(stmt, mapping))
        if isinstance(stmt, LetDecl) and stmt.name in mapping:
            # later statements refer to the local declaration, not the free name
            mapping = {k: v for k, v in mapping.items() if k != stmt.name}
    return tuple(out)


def _rename_stmt(stmt, mapping: dict):
    from .syntax import ExprStmt, If, Return, While

    if isinstance(stmt, LetDecl):
        return LetDecl(stmt.name, stmt.declared_type, _rename_expr(stmt.init, mapping))
    if isinstance(stmt, Assign):
        return Assign(mapping.get(stmt.target, stmt.target), _rename_expr(stmt.expr, mapping))
    if isinstance(stmt, ExprStmt):
        return ExprStmt(_rename_expr(stmt.expr, mapping))
    if isinstance(stmt, Return):
        return stmt if stmt.expr is None else Return(_rename_expr(stmt.expr, mapping))
    if isinstance(stmt, If):
        return If(
            _rename_expr(stmt.cond, mapping),
            _rename_body(stmt.then_body, mapping),
            None if stmt.else_body is None else _rename_body(stmt.else_body, mapping),
        )
    if isinstance(stmt, While):
        return While(_rename_expr(stmt.cond, mapping), _rename_body(stmt.body, mapping))
    return with_bodies(stmt, tuple(_rename_body(b, mapping) for b in child_bodies(stmt)))


def rename_free(stmt, mapping: dict):
    """Fresh copy of ``stmt`` with free occurrences renamed per ``mapping``.

    Every node of the result is newly built, so the copy never shares
    statement objects with the input.
    """
    return _rename_stmt(stmt, dict(mapping))


def fresh_copy(stmt):
    return _rename_stmt(stmt, {})


# -- rewriting -----------------------------------------------------------------


def rewrite(program: Program, sid: int, replace) -> Program:
    """New program where statement ``sid`` is replaced by ``replace(stmt)``.

    ``replace`` returns a tuple of statements (empty to delete). The input
    program is left untouched.
    """
    counter = [0]
    found = [False]

    def body_(body):
        out = []
        for stmt in body:
            here = counter[0]
            counter[0] += 1
            if here == sid:
                found[0] = True
                out.extend(replace(stmt))
                # skip ids of the replaced subtree
                counter[0] += _count(stmt) - 1
                continue
            bodies = child_bodies(stmt)
            if bodies:
                stmt = with_bodies(stmt, tuple(body_(b) for b in bodies))
            out.append(stmt)
        return tuple(out)

    functions = tuple(Function(fn.name, fn.params, fn.return_type, body_(fn.body)) for fn in program.functions)
    if not found[0]:
        raise KeyError(f"no statement with id {sid}")
    return Program(functions)


def _count(stmt) -> int:
    return 1 + sum(_count(s) for body in child_bodies(stmt) for s in body)
