"""Test-suite execution, statement coverage and trace capture."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

from ..minilang.syntax import Program
from .interpreter import DEFAULT_FUEL, ExecutionTrace, Interpreter, TestOutcome

log = logging.getLogger(__name__)


@dataclass
class CoverageMap:
    covered: set = field(default_factory=set)
    per_test: dict = field(default_factory=dict)

    def ratio(self, sids) -> float:
        sids = list(sids)
        if not sids:
            return 1.0
        return sum(1 for s in sids if s in self.covered) / len(sids)


def run_test(program: Program, test_name: str, fuel: int = DEFAULT_FUEL, trace: bool = False):
    """Run a single test; returns ``(TestOutcome, ExecutionTrace or None)``."""
    fn = program.function(test_name)
    if fn is None or not fn.is_test:
        raise ValueError(f"{test_name!r} is not a test function")
    outcome, tr, _ = Interpreter(program, trace=trace).run_test(test_name, fuel)
    return outcome, tr


def run_suite(program: Program, fuel: int = DEFAULT_FUEL, stop_on_failure: bool = False,
              tests: Optional[list] = None) -> list:
    """Run every test function in name order.

    With ``stop_on_failure`` the remaining tests are skipped after the first
    non-passing one (used when only the suite verdict matters).
    """
    names = program.test_names if tests is None else sorted(tests)
    if not names:
        log.warning("program has no test functions; suite passes vacuously")
    interp = Interpreter(program)
    outcomes = []
    for name in names:
        outcome, _, _ = interp.run_test(name, fuel)
        outcomes.append(outcome)
        if stop_on_failure and not outcome.passed:
            break
    return outcomes


def suite_passes(outcomes) -> bool:
    return all(o.passed for o in outcomes)


def coverage_of_suite(program: Program, fuel: int = DEFAULT_FUEL) -> CoverageMap:
    interp = Interpreter(program, coverage=True)
    cov = CoverageMap()
    for name in program.test_names:
        _, _, hits = interp.run_test(name, fuel)
        cov.per_test[name] = hits
        cov.covered |= hits
    return cov


def capture_traces(program: Program, fuel: int = DEFAULT_FUEL) -> dict:
    """Map test name -> ExecutionTrace (partial for failing tests)."""
    interp = Interpreter(program, trace=True)
    traces = {}
    for name in program.test_names:
        _, tr, _ = interp.run_test(name, fuel)
        traces[name] = tr
    return traces


# -- trace dump format ----------------------------------------------------------


def dump_trace(trace: ExecutionTrace) -> str:
    lines = []
    for sig in trace.calls:
        lines.append(f"CALL {sig}")
    for sid, snapshot in trace.data:
        fields = ";".join(f"{n}={v}" for n, v in snapshot)
        lines.append(f"DATA {sid} {fields}".rstrip())
    return "\n".join(lines) + "\n"


def _split_fields(text: str) -> list:
    # ';' separates fields except inside quoted strings
    fields, cur, quoted, escaped = [], [], False, False
    for ch in text:
        if escaped:
            escaped = False
        elif ch == "\\" and quoted:
            escaped = True
        elif ch == '"':
            quoted = not quoted
        elif ch == ";" and not quoted:
            fields.append("".join(cur))
            cur = []
            continue
        cur.append(ch)
    if cur:
        fields.append("".join(cur))
    return fields


def load_trace(text: str) -> ExecutionTrace:
    trace = ExecutionTrace()
    for line in text.splitlines():
        if line.startswith("CALL "):
            trace.calls.append(line[5:])
        elif line.startswith("DATA "):
            head, _, rest = line[5:].partition(" ")
            snapshot = []
            for f in _split_fields(rest):
                name, _, value = f.partition("=")
                snapshot.append((name, value))
            trace.data.append((int(head), tuple(snapshot)))
        elif line.strip():
            raise ValueError(f"malformed trace line: {line!r}")
    return trace
