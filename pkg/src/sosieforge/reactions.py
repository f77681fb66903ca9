"""Per-statement typing fingerprints ("reactions") and their compatibility."""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass
from math import prod

from .minilang import VOID, definitely_returns, free_variables, scope_environments
from .minilang.syntax import Program
from .minilang.types import StaticType


@dataclass(frozen=True)
class Reaction:
    """Input context (multiset of free-variable types) plus output context."""

    inputs: tuple  # sorted ((type, count), ...) keyed by str(type)
    output: StaticType

    @classmethod
    def of(cls, types, output) -> "Reaction":
        counts = Counter(types)
        return cls(tuple(sorted(counts.items(), key=lambda kv: str(kv[0]))), output)

    @property
    def input_counts(self) -> Counter:
        return Counter(dict(self.inputs))

    def input_list(self) -> list:
        return [str(t) for t, n in self.inputs for _ in range(n)]

    def to_json(self) -> dict:
        return {"input": self.input_list(), "output": str(self.output)}


def extract_reaction(stmt, env: dict, return_type: StaticType = VOID) -> Reaction:
    """Reaction of ``stmt`` given the variables visible just before it.

    ``return_type`` is the enclosing function's return type; it becomes the
    output context when ``stmt`` returns a value on every path.
    """
    types = [env[name] for name in free_variables(stmt) if name in env]
    output = return_type if return_type != VOID and definitely_returns(stmt) else VOID
    return Reaction.of(types, output)


def compatible(transplant: Reaction, point: Reaction) -> bool:
    """Multiset inclusion of input contexts and equal output contexts."""
    if transplant.output != point.output:
        return False
    have = dict(point.inputs)
    return all(have.get(t, 0) >= n for t, n in transplant.inputs)


class ReactionIndex:
    """Reactions of every statement of a program, built once."""

    def __init__(self, program: Program):
        self.program = program
        self.envs = scope_environments(program)
        self.reactions: dict = {}
        self.context: dict = {}
        self.by_reaction: dict = defaultdict(list)
        for info in program.statements:
            env = self.envs.get(info.sid, {})
            r = extract_reaction(info.stmt, env, info.function.return_type)
            self.reactions[info.sid] = r
            self.context[info.sid] = tuple((n, env[n]) for n in free_variables(info.stmt) if n in env)
            self.by_reaction[r].append(info.sid)
        self._compatible_cache: dict = {}

    def __getitem__(self, sid) -> Reaction:
        return self.reactions[sid]

    def __len__(self) -> int:
        return len(self.reactions)

    def free_vars(self, sid) -> tuple:
        """``((name, type), ...)`` of the statement's free variables."""
        return self.context[sid]

    def compatible_with(self, point: int) -> list:
        """Application statements whose reaction is compatible with ``point``'s."""
        cached = self._compatible_cache.get(point)
        if cached is None:
            target = self.reactions[point]
            cached = [s for s in self.program.app_sids if compatible(self.reactions[s], target)]
            self._compatible_cache[point] = cached
        return cached

    def mapping_choices(self, point: int, transplant: int) -> list:
        """Per transplant free variable, the same-typed point-context names."""
        ctx = self.free_vars(point)
        return [
            (name, [n for n, t in ctx if t == typ])
            for name, typ in self.free_vars(transplant)
        ]

    def mapping_count(self, point: int, transplant: int) -> int:
        return prod(len(opts) for _, opts in self.mapping_choices(point, transplant))

    def dump(self) -> str:
        """One JSON object per line: stmt id, input types, output type."""
        lines = []
        for sid in sorted(self.reactions):
            row = {"stmt_id": sid, **self.reactions[sid].to_json()}
            lines.append(json.dumps(row, sort_keys=True))
        return "\n".join(lines) + "\n"


def count_candidates(kind: str, tested_points, index: ReactionIndex, program: Program = None) -> int:
    """Size of a transformation's search space over ``tested_points``.

    delete: one candidate per point. Random: every program statement per
    point. Wittgenstein: statements whose free names are among the point's
    names. Reaction: statements with a compatible reaction. Steroid: Reaction
    candidates weighted by their number of variable mappings. Add/replace
    preconditions are not subtracted, so this bounds the distinct variants.
    """
    from .transforms import split_kind, witt_compatible

    program = index.program if program is None else program
    points = list(tested_points)
    if kind == "delete":
        return len(points)
    _, strategy = split_kind(kind)
    if strategy == "random":
        return len(points) * len(program.app_sids)
    total = 0
    for p in points:
        if strategy == "wittgenstein":
            total += len(witt_compatible(program, index, p))
        elif strategy == "reaction":
            total += len(index.compatible_with(p))
        else:
            total += sum(index.mapping_count(p, t) for t in index.compatible_with(p))
    return total
