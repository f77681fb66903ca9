"""Static types of MiniLang."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class Prim:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class ListOf:
    element: StaticType

    def __post_init__(self):
        if self.element == VOID:
            raise ValueError("list element type cannot be void")

    def __str__(self) -> str:
        return f"[{self.element}]"


StaticType = Prim | ListOf

INT = Prim("int")
BOOL = Prim("bool")
STR = Prim("str")
VOID = Prim("void")

_PRIMS = {"int": INT, "bool": BOOL, "str": STR, "void": VOID}


def parse_type(text: str) -> StaticType:
    """Inverse of ``str()`` on a type, e.g. ``"[[int]]"``."""
    text = text.strip()
    if text.startswith("[") and text.endswith("]"):
        return ListOf(parse_type(text[1:-1]))
    try:
        return _PRIMS[text]
    except KeyError:
        raise ValueError(f"unknown type {text!r}") from None
