"""The nine statement-level sosiefication transformations.

Every transformation targets a transplantation point (a statement id). Add
inserts a transplant right after the point, Replace swaps the point for the
transplant, Delete removes the point. Transplants are always statements of
the same program, copied fresh.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Optional

from .minilang import definitely_returns, rewrite
from .minilang.statements import free_variables, rename_free
from .minilang.syntax import LetDecl, Program, Return, iter_stmts
from .reactions import ReactionIndex

KINDS = (
    "delete",
    "add_random",
    "replace_random",
    "add_wittgenstein",
    "replace_wittgenstein",
    "add_reaction",
    "replace_reaction",
    "add_steroid",
    "replace_steroid",
)
STRATEGIES = ("random", "wittgenstein", "reaction", "steroid")


class NoCandidate(Exception):
    """The filtered transplant set is empty for this point and kind."""


class InvalidRecord(ValueError):
    pass


def split_kind(kind: str) -> tuple:
    if kind == "delete":
        return "delete", None
    if kind not in KINDS:
        raise ValueError(f"unknown transformation kind {kind!r}")
    family, strategy = kind.split("_", 1)
    return family, strategy


@dataclass(frozen=True)
class TransformationRecord:
    kind: str
    point: int
    transplant: Optional[int] = None
    # sorted ((transplant name, point-context name), ...); Steroid only
    mapping: tuple = ()
    # ((drawn index, population size), ...) in draw order
    rng_draws: tuple = field(default=(), compare=False)

    @property
    def key(self) -> tuple:
        return (self.kind, self.point, self.transplant, self.mapping)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "point": self.point,
            "transplant": self.transplant,
            "mapping": dict(self.mapping),
            "rng_draws": [list(d) for d in self.rng_draws],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, data: dict) -> "TransformationRecord":
        return cls(
            kind=data["kind"],
            point=int(data["point"]),
            transplant=None if data.get("transplant") is None else int(data["transplant"]),
            mapping=tuple(sorted((data.get("mapping") or {}).items())),
            rng_draws=tuple(tuple(d) for d in data.get("rng_draws", ())),
        )


# -- preconditions ---------------------------------------------------------------


def _return_type(program: Program, sid: int):
    """Type of the value returned by a Return statement (void for ``return;``)."""
    from .minilang import VOID

    stmt = program.stmt(sid)
    if stmt.expr is None:
        return VOID
    return program.statements[sid].function.return_type


def replace_allowed(program: Program, point: int, transplant: int) -> bool:
    """Replace preconditions: never by itself; let and return only by their own kind."""
    if point == transplant:
        return False
    p = program.stmt(point)
    t = program.stmt(transplant)
    if isinstance(p, LetDecl):
        return isinstance(t, LetDecl) and t.declared_type == p.declared_type
    if isinstance(p, Return):
        return isinstance(t, Return) and _return_type(program, point) == _return_type(program, transplant)
    return True


def add_allowed(program: Program, point: int) -> bool:
    # code inserted after a statement that always returns could never run
    return not definitely_returns(program.stmt(point))


def delete_allowed(program: Program, point: int) -> bool:
    return not isinstance(program.stmt(point), Return)


def _point_names(program: Program, index: ReactionIndex, point: int) -> set:
    names = {n for n, _ in index.free_vars(point)}
    stmt = program.stmt(point)
    if isinstance(stmt, LetDecl):
        names.add(stmt.name)
    return names


def returns_fit(program: Program, point: int, transplant: int) -> bool:
    """Returns nested in the transplant stay well-typed at the point.

    A reaction only sees a return that ends every path; a conditional one
    (``if c { return v; }``) is invisible to it but still must match the
    enclosing function's return type.
    """
    if not any(isinstance(s, Return) for s in iter_stmts(program.stmt(transplant))):
        return True
    info = program.statements
    return info[transplant].function.return_type == info[point].function.return_type


def witt_compatible(program: Program, index: ReactionIndex, point: int) -> list:
    """Application statements whose free names all occur at ``point``."""
    names = _point_names(program, index, point)
    return [t for t in program.app_sids if set(free_variables(program.stmt(t))) <= names]


def candidate_transplants(kind: str, point: int, program: Program, index: ReactionIndex) -> list:
    """Statement ids a ``kind`` transformation may transplant at ``point``."""
    family, strategy = split_kind(kind)
    if family == "delete":
        return []
    if family == "add":
        if not add_allowed(program, point):
            return []
        base = program.app_sids
    else:
        base = [t for t in program.app_sids if replace_allowed(program, point, t)]
    if strategy == "random":
        return list(base)
    if strategy == "wittgenstein":
        allowed = set(witt_compatible(program, index, point))
        return [t for t in base if t in allowed]
    compatible = set(index.compatible_with(point))
    return [t for t in base if t in compatible and returns_fit(program, point, t)]


def eligible_points(program: Program, coverage, index: ReactionIndex) -> list:
    """Covered application statements with a compatible transplant elsewhere."""
    return [
        sid
        for sid in program.app_sids
        if sid in coverage.covered and any(t != sid for t in index.compatible_with(sid))
    ]


# -- selection --------------------------------------------------------------------


def _decode(j: int, choices: list) -> tuple:
    mapping = []
    for name, opts in choices:
        j, r = divmod(j, len(opts))
        mapping.append((name, opts[r]))
    return tuple(sorted(mapping))


def all_mappings(index: ReactionIndex, point: int, transplant: int) -> list:
    choices = index.mapping_choices(point, transplant)
    total = index.mapping_count(point, transplant)
    return [_decode(j, choices) for j in range(total)]


def select_transplant(kind: str, point: int, program: Program, index: ReactionIndex,
                      rng: random.Random) -> TransformationRecord:
    """Draw one concrete transformation of ``kind`` at ``point``.

    Raises NoCandidate when nothing can be transplanted there.
    """
    family, strategy = split_kind(kind)
    if family == "delete":
        if not delete_allowed(program, point):
            raise NoCandidate(f"{kind}: statement {point} is a return")
        return TransformationRecord(kind, point)
    cands = candidate_transplants(kind, point, program, index)
    if not cands:
        raise NoCandidate(f"{kind}: no candidate at statement {point}")
    i = rng.randrange(len(cands))
    transplant = cands[i]
    draws = [(i, len(cands))]
    mapping: tuple = ()
    if strategy == "steroid":
        choices = index.mapping_choices(point, transplant)
        total = index.mapping_count(point, transplant)
        j = rng.randrange(total)
        draws.append((j, total))
        mapping = _decode(j, choices)
    return TransformationRecord(kind, point, transplant, mapping, tuple(draws))


# -- application ----------------------------------------------------------------


def check_record(program: Program, record: TransformationRecord) -> None:
    """Raise InvalidRecord when ``record`` violates a transformation invariant."""
    n = len(program.statements)
    if not 0 <= record.point < n:
        raise InvalidRecord(f"point {record.point} out of range")
    family, strategy = split_kind(record.kind)
    if family == "delete":
        if record.transplant is not None:
            raise InvalidRecord("delete takes no transplant")
        if not delete_allowed(program, record.point):
            raise InvalidRecord("delete of a return statement")
        return
    if record.transplant is None or not 0 <= record.transplant < n:
        raise InvalidRecord("missing or out-of-range transplant")
    if family == "replace" and not replace_allowed(program, record.point, record.transplant):
        raise InvalidRecord("replace precondition violated")
    if family == "add" and not add_allowed(program, record.point):
        raise InvalidRecord("add after a returning statement")
    if record.mapping and strategy != "steroid":
        raise InvalidRecord("only steroid transformations rename variables")


def transplanted_statement(program: Program, record: TransformationRecord):
    """The fresh statement a record inserts (renamed, let name reused)."""
    stmt = rename_free(program.stmt(record.transplant), dict(record.mapping))
    point = program.stmt(record.point)
    if record.kind.startswith("replace") and isinstance(point, LetDecl):
        stmt = LetDecl(point.name, stmt.declared_type, stmt.init)
    return stmt


def apply(program: Program, record: TransformationRecord) -> Program:
    """Variant of ``program`` with ``record`` applied; the input is not modified."""
    check_record(program, record)
    family, _ = split_kind(record.kind)
    if family == "delete":
        return rewrite(program, record.point, lambda s: ())
    new = transplanted_statement(program, record)
    if family == "add":
        return rewrite(program, record.point, lambda s: (s, new))
    return rewrite(program, record.point, lambda s: (new,))


def inserted_sid(program: Program, record: TransformationRecord) -> Optional[int]:
    """Id the transplanted statement gets in the variant (None for delete)."""
    family, _ = split_kind(record.kind)
    if family == "delete":
        return None
    if family == "replace":
        return record.point
    return record.point + sum(1 for _ in iter_stmts(program.stmt(record.point)))
