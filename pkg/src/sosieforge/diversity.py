"""Computational diversity between a program and its sosies.

Both programs run every test with tracing on. Call sequences and the values
observed at control points (if/while conditions) are compared after masking
whatever already varies between repeated runs of the original.
"""

from __future__ import annotations

import difflib
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from .minilang import format_stmt, parse, typecheck
from .minilang.syntax import Program
from .runtime import DEFAULT_FUEL, ExecutionTrace, Interpreter

log = logging.getLogger(__name__)

DEFAULT_RUNS = 2
MASKED = "<noise>"


@dataclass
class NoiseMask:
    # test name -> set of call positions / set of (control point, variable)
    calls: dict = field(default_factory=dict)
    data: dict = field(default_factory=dict)

    def is_empty(self) -> bool:
        return not any(self.calls.values()) and not any(self.data.values())

    def for_test(self, name: str):
        return self.calls.get(name, frozenset()), self.data.get(name, frozenset())


def _traces(program: Program, fuel: int, tests) -> dict:
    interp = Interpreter(program, trace=True)
    out = {}
    for name in tests:
        outcome, trace, _ = interp.run_test(name, fuel)
        out[name] = (outcome, trace)
    return out


def _noisy_positions(seqs) -> set:
    longest = max(len(s) for s in seqs)
    noisy = set()
    for i in range(longest):
        column = {s[i] if i < len(s) else None for s in seqs}
        if len(column) > 1:
            noisy.add(i)
    return noisy


def _noisy_data(runs) -> set:
    noisy = set()
    longest = max(len(r) for r in runs)
    for i in range(longest):
        events = [r[i] if i < len(r) else None for r in runs]
        present = [e for e in events if e is not None]
        points = {e[0] for e in present}
        if len(present) < len(events) or len(points) > 1:
            # event structure itself is unstable: every variable seen there is noise
            for sid, snap in present:
                noisy.update((sid, n) for n, _ in snap)
            continue
        sid = present[0][0]
        values = {}
        for _, snap in present:
            for n, v in snap:
                values.setdefault(n, set()).add(v)
        for n, vs in values.items():
            if len(vs) > 1 or any(n not in dict(snap) for _, snap in present):
                noisy.add((sid, n))
    return noisy


def build_noise_mask(original: Program, fuel: int = DEFAULT_FUEL, runs: int = DEFAULT_RUNS,
                     tests=None) -> NoiseMask:
    """Mark call positions and (control point, variable) pairs that vary across runs."""
    if runs < 2:
        raise ValueError("a noise mask needs at least two runs")
    tests = original.test_names if tests is None else sorted(tests)
    samples = [_traces(original, fuel, tests) for _ in range(runs)]
    mask = NoiseMask()
    for name in tests:
        for outcome, _ in (s[name] for s in samples):
            if not outcome.passed:
                raise ValueError(f"original fails {name}: {outcome.message}")
        traces = [s[name][1] for s in samples]
        mask.calls[name] = frozenset(_noisy_positions([t.calls for t in traces]))
        mask.data[name] = frozenset(_noisy_data([t.data for t in traces]))
    return mask


def _masked_calls(calls, noisy) -> list:
    return [c for i, c in enumerate(calls) if i not in noisy]


def _masked_data(data, noisy) -> list:
    return [(sid, tuple((n, MASKED if (sid, n) in noisy else v) for n, v in snap)) for sid, snap in data]


def compare_traces(a: ExecutionTrace, b: ExecutionTrace, mask: Optional[NoiseMask] = None,
                   test: Optional[str] = None):
    """Return ``(call_diff, data_diff)`` after masking noise recorded for ``test``."""
    calls_noise, data_noise = mask.for_test(test) if mask is not None else (frozenset(), frozenset())
    call_diff = _masked_calls(a.calls, calls_noise) != _masked_calls(b.calls, calls_noise)
    data_diff = _masked_data(a.data, data_noise) != _masked_data(b.data, data_noise)
    return call_diff, data_diff


# -- control point alignment ---------------------------------------------------------


def _heads(program: Program) -> list:
    return [(info.function.name, info.depth, format_stmt(info.stmt).splitlines()[0]) for info in program.statements]


def statement_alignment(original: Program, variant: Program) -> dict:
    """Map variant StatementIds to the original's, for statements an edit left alone.

    Statements introduced by the edit are absent from the mapping.
    """
    a, b = _heads(original), _heads(variant)
    matcher = difflib.SequenceMatcher(None, a, b, autojunk=False)
    mapping = {}
    for block in matcher.get_matching_blocks():
        for k in range(block.size):
            mapping[block.b + k] = block.a + k
    return mapping


def align_trace(trace: ExecutionTrace, mapping: dict) -> ExecutionTrace:
    """Rename control points of a variant trace into the original's numbering."""
    data = [(mapping.get(sid, f"new:{sid}"), snap) for sid, snap in trace.data]
    return ExecutionTrace(list(trace.calls), data)


# -- measurement ---------------------------------------------------------------------


@dataclass
class PoolEntry:
    sosie_id: str
    program: Optional[Program]
    record: Optional[dict] = None
    error: Optional[str] = None


@dataclass
class DiversityVerdict:
    sosie_id: str
    call_diversity: bool
    variable_diversity: bool
    diverse_tests_by_call: int
    diverse_tests_by_data: int
    call_tests: list = field(default_factory=list)
    data_tests: list = field(default_factory=list)


@dataclass
class DiversityReport:
    pool_size: int
    any_diversity: int
    call_diversity: int
    variable_diversity: int
    pct_any: float
    pct_call: float
    pct_variable: float
    mean_tests_call: float
    mean_tests_data: float
    runs: int
    verdicts: list = field(default_factory=list)
    excluded: list = field(default_factory=list)

    def to_json(self) -> dict:
        return asdict(self)


_STATE: dict = {}


def _init(original, tests, fuel, mask, baseline):
    _STATE.update(original=original, tests=tests, fuel=fuel, mask=mask, baseline=baseline)


def _verdict(entry: PoolEntry) -> DiversityVerdict:
    s = _STATE
    mapping = statement_alignment(s["original"], entry.program)
    theirs = _traces(entry.program, s["fuel"], s["tests"])
    by_call, by_data = [], []
    for name in s["tests"]:
        mine = s["baseline"][name][1]
        other = align_trace(theirs[name][1], mapping)
        call_diff, data_diff = compare_traces(mine, other, s["mask"], name)
        if call_diff:
            by_call.append(name)
        if data_diff:
            by_data.append(name)
    return DiversityVerdict(entry.sosie_id, bool(by_call), bool(by_data), len(by_call), len(by_data),
                            by_call, by_data)


def reverify(program: Program, tests, fuel: int) -> Optional[str]:
    """None if ``program`` is still a sosie, else the reason it is not."""
    diags = typecheck(program)
    if diags:
        return f"ill-formed: {diags[0]}"
    if sorted(program.test_names) != sorted(tests):
        return "test suite differs from the original"
    interp = Interpreter(program)
    for name in tests:
        outcome, _, _ = interp.run_test(name, fuel)
        if not outcome.passed:
            return f"{name}: {outcome.status} {outcome.message}".rstrip()
    return None


def measure_diversity(pool, original: Program, tests=None, fuel: int = DEFAULT_FUEL,
                      runs: int = DEFAULT_RUNS, workers: int = 1) -> DiversityReport:
    """Per-sosie call and data diversity against ``original``.

    Pool entries that no longer pass the suite are excluded and listed.
    """
    tests = original.test_names if tests is None else sorted(tests)
    mask = build_noise_mask(original, fuel, runs, tests)
    baseline = _traces(original, fuel, tests)
    kept, excluded = [], []
    for entry in sorted(pool, key=lambda e: e.sosie_id):
        reason = entry.error or reverify(entry.program, tests, fuel)
        if reason is None:
            kept.append(entry)
        else:
            log.warning("excluding %s: %s", entry.sosie_id, reason)
            excluded.append({"sosie_id": entry.sosie_id, "reason": reason})
    args = (original, tests, fuel, mask, baseline)
    if workers > 1 and len(kept) > 1:
        with ProcessPoolExecutor(workers, initializer=_init, initargs=args) as pool_:
            verdicts = list(pool_.map(_verdict, kept))
    else:
        _init(*args)
        verdicts = [_verdict(e) for e in kept]
    n = len(verdicts)
    calls = [v for v in verdicts if v.call_diversity]
    data = [v for v in verdicts if v.variable_diversity]
    anyd = [v for v in verdicts if v.call_diversity or v.variable_diversity]

    def pct(k):
        return 100.0 * k / n if n else 0.0

    def mean(vs, attr):
        return sum(getattr(v, attr) for v in vs) / len(vs) if vs else 0.0

    return DiversityReport(
        pool_size=n,
        any_diversity=len(anyd),
        call_diversity=len(calls),
        variable_diversity=len(data),
        pct_any=pct(len(anyd)),
        pct_call=pct(len(calls)),
        pct_variable=pct(len(data)),
        mean_tests_call=mean(calls, "diverse_tests_by_call"),
        mean_tests_data=mean(data, "diverse_tests_by_data"),
        runs=runs,
        verdicts=verdicts,
        excluded=excluded,
    )


def load_pool(pool_dir, only_sosies: bool = True) -> list:
    """Read stored variants laid out as ``<kind>/<n>/program.mini``.

    ``pool_dir`` may be a campaign's program directory or the output root
    containing it. Unparseable entries carry an ``error`` and are excluded
    later by :func:`measure_diversity`.
    """
    root = Path(pool_dir)
    entries = []
    for src in sorted(root.rglob("program.mini")):
        d = src.parent
        outcome_file = d / "outcome.json"
        if only_sosies and outcome_file.exists():
            if json.loads(outcome_file.read_text(encoding="utf-8")).get("class") != "Sosie":
                continue
        parsed = parse(src.read_text(encoding="utf-8"))
        sid = d.relative_to(root).as_posix()
        record_file = d / "record.json"
        record = json.loads(record_file.read_text(encoding="utf-8")) if record_file.exists() else None
        if isinstance(parsed, list):
            entries.append(PoolEntry(sid, None, record, error=f"unparseable: {parsed[0]}"))
        else:
            entries.append(PoolEntry(sid, parsed, record))
    return entries


def render_diversity_csv(report: DiversityReport) -> str:
    """One row per sosie verdict."""
    import csv
    import io

    buf = io.StringIO()
    cols = ["sosie_id", "call_diversity", "variable_diversity", "diverse_tests_by_call", "diverse_tests_by_data"]
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for v in report.verdicts:
        writer.writerow([getattr(v, c) for c in cols])
    return buf.getvalue()
