"""MiniLang: a small statically typed imperative language."""

from .diagnostics import Diagnostic, MiniLangError
from .parser import parse
from .printer import format_stmt, pretty_print
from .statements import enumerate_statements, free_variables, rewrite
from .syntax import Program
from .typecheck import definitely_returns, scope_environments, typecheck
from .types import BOOL, INT, STR, VOID, ListOf, StaticType, parse_type


def load(source: str, check: bool = True) -> Program:
    """Parse (and by default typecheck) ``source``, raising on diagnostics."""
    result = parse(source)
    if isinstance(result, list):
        raise MiniLangError(result)
    if check:
        diags = typecheck(result)
        if diags:
            raise MiniLangError(diags)
    return result


__all__ = [
    "BOOL",
    "INT",
    "STR",
    "VOID",
    "Diagnostic",
    "ListOf",
    "MiniLangError",
    "Program",
    "StaticType",
    "definitely_returns",
    "enumerate_statements",
    "format_stmt",
    "free_variables",
    "load",
    "parse",
    "parse_type",
    "pretty_print",
    "rewrite",
    "scope_environments",
    "typecheck",
]
