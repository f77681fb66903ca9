"""Corpus layout, loading and admission checks.

A corpus program is a directory ``<program>/src/*.mini`` (application code)
plus ``<program>/tests/*.mini`` (test functions only).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

from .minilang import MiniLangError, parse, typecheck
from .minilang.syntax import Program
from .runtime import DEFAULT_FUEL, coverage_of_suite, run_suite

BUNDLED_DIR = Path(__file__).parent / "corpus"
BUNDLED = ("demo", "textkit", "listalgo")
DEFAULT_COVERAGE_THRESHOLD = 0.70


class CorpusError(Exception):
    def __init__(self, message, diagnostics=()):
        self.diagnostics = list(diagnostics)
        super().__init__(message)


def resolve(path) -> Path:
    """A program directory; bare names of bundled programs are accepted."""
    p = Path(path)
    if p.is_dir():
        return p
    if str(path) in BUNDLED:
        return BUNDLED_DIR / str(path)
    raise CorpusError(f"corpus program not found: {path}")


def source_files(program_dir) -> list:
    root = resolve(program_dir)
    files = sorted((root / "src").glob("*.mini")) + sorted((root / "tests").glob("*.mini"))
    if not files:
        raise CorpusError(f"no .mini files under {root}")
    return files


def load_program(program_dir, check: bool = True) -> Program:
    """Parse every file of a corpus program into one :class:`Program`."""
    functions = []
    diags = []
    for path in source_files(program_dir):
        result = parse(path.read_text(encoding="utf-8"))
        if isinstance(result, list):
            diags.extend(f"{path.name}: {d}" for d in result)
            continue
        if path.parent.name == "tests":
            for fn in result.functions:
                if not fn.is_test:
                    diags.append(f"{path.name}: non-test function {fn.name!r} in tests/")
        functions.extend(result.functions)
    if diags:
        raise CorpusError(f"cannot parse {program_dir}", diags)
    program = Program(tuple(functions))
    if check:
        errors = typecheck(program)
        if errors:
            raise CorpusError(f"{program_dir} does not typecheck", [str(d) for d in errors])
    return program


def corpus_hash(program_dir) -> str:
    h = hashlib.sha256()
    root = resolve(program_dir)
    for path in source_files(root):
        h.update(path.relative_to(root).as_posix().encode())
        h.update(b"\0")
        h.update(path.read_bytes())
        h.update(b"\0")
    return h.hexdigest()


@dataclass
class CorpusCheck:
    program: str
    ok: bool
    statements: int = 0
    tests: int = 0
    coverage: float = 0.0
    diagnostics: list = field(default_factory=list)


def corpus_check(program_dir, threshold: float = DEFAULT_COVERAGE_THRESHOLD,
                 fuel: int = DEFAULT_FUEL) -> CorpusCheck:
    """Admission check: parses, typechecks, green suite, statement coverage."""
    name = resolve(program_dir).name
    try:
        program = load_program(program_dir)
    except CorpusError as exc:
        return CorpusCheck(name, False, diagnostics=[str(exc)] + exc.diagnostics)
    except MiniLangError as exc:
        return CorpusCheck(name, False, diagnostics=[str(d) for d in exc.diagnostics])
    result = CorpusCheck(name, True, statements=len(program.app_sids), tests=len(program.test_names))
    if not program.test_names:
        result.ok = False
        result.diagnostics.append("no test functions")
    for outcome in run_suite(program, fuel):
        if not outcome.passed:
            result.ok = False
            result.diagnostics.append(f"test {outcome.name}: {outcome.status} {outcome.message}".rstrip())
    cov = coverage_of_suite(program, fuel)
    result.coverage = cov.ratio(program.app_sids)
    if result.coverage < threshold:
        result.ok = False
        result.diagnostics.append(
            f"statement coverage {result.coverage:.1%} below threshold {threshold:.0%}"
        )
    return result


def validate_baseline(program_dir, fuel: int = DEFAULT_FUEL) -> Program:
    """Load a program that is fit for sosiefication, or raise CorpusError."""
    program = load_program(program_dir)
    failing = [o for o in run_suite(program, fuel) if not o.passed]
    if failing:
        raise CorpusError(
            f"{program_dir}: test suite is not green",
            [f"test {o.name}: {o.status} {o.message}".rstrip() for o in failing],
        )
    return program


__all__ = [
    "BUNDLED",
    "BUNDLED_DIR",
    "CorpusCheck",
    "CorpusError",
    "corpus_check",
    "corpus_hash",
    "load_program",
    "resolve",
    "source_files",
    "validate_baseline",
]
