"""Budgeted sosiefication campaigns.

A campaign repeatedly draws an eligible transplantation point, tries every
enabled transformation kind on it, and classifies each new variant as a
sosie, a degenerated variant or an ill-formed variant.
"""

from __future__ import annotations

import hashlib
import json
import logging
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from .corpus import corpus_hash, resolve, validate_baseline
from .minilang import pretty_print, typecheck
from .minilang.syntax import Program
from .reactions import ReactionIndex, count_candidates
from .runtime import DEFAULT_FUEL, Interpreter, coverage_of_suite
from .transforms import KINDS, NoCandidate, TransformationRecord, apply, eligible_points, select_transplant

log = logging.getLogger(__name__)

SOSIE = "Sosie"
DEGENERATED = "Degenerated"
ILL_FORMED = "IllFormed"
REPORT_SCHEMA = "sosieforge/campaign-report/1"


class ConfigError(ValueError):
    pass


@dataclass
class CampaignConfig:
    corpus: str
    seed: int = 0
    budget: int = 1000
    kinds: tuple = KINDS
    fuel: int = DEFAULT_FUEL
    out: Optional[str] = None
    keep_all: bool = False
    max_seconds: Optional[float] = None
    workers: int = 1

    def validate(self) -> None:
        if self.budget < 0:
            raise ConfigError("budget must be non-negative")
        if self.fuel <= 0:
            raise ConfigError("fuel must be positive")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        unknown = [k for k in self.kinds if k not in KINDS]
        if unknown or not self.kinds:
            raise ConfigError(f"unknown transformation kinds: {unknown or 'none given'}")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")

    def fingerprint(self) -> str:
        """Hash of every setting that influences results (not paths or workers)."""
        data = {
            "program": resolve(self.corpus).name,
            "seed": self.seed,
            "budget": self.budget,
            "kinds": list(self.kinds),
            "fuel": self.fuel,
            "max_seconds": self.max_seconds,
        }
        return hashlib.sha256(json.dumps(data, sort_keys=True).encode()).hexdigest()


@dataclass
class VariantOutcome:
    record: Optional[TransformationRecord]
    cls: str
    failing_tests: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)
    cost: int = 0
    seconds: float = 0.0

    @property
    def compiles(self) -> bool:
        return self.cls != ILL_FORMED

    def to_json(self) -> dict:
        # wall time is deliberately left out: persisted files must be reproducible
        return {
            "class": self.cls,
            "failing_tests": self.failing_tests,
            "diagnostics": self.diagnostics,
            "cost": self.cost,
        }


def classify_variant(variant: Program, tests, fuel: int = DEFAULT_FUEL,
                     record: Optional[TransformationRecord] = None) -> VariantOutcome:
    """Typecheck, then run the suite until the first non-passing test."""
    started = time.perf_counter()
    diags = typecheck(variant)
    cost = len(variant.statements)
    if diags:
        return VariantOutcome(record, ILL_FORMED, diagnostics=[str(d) for d in diags], cost=cost,
                              seconds=time.perf_counter() - started)
    interp = Interpreter(variant)
    failing = []
    for name in sorted(tests):
        outcome, _, _ = interp.run_test(name, fuel)
        cost += outcome.steps
        if not outcome.passed:
            failing.append(f"{name}: {outcome.status}")
            break
    cls = DEGENERATED if failing else SOSIE
    return VariantOutcome(record, cls, failing_tests=failing, cost=cost, seconds=time.perf_counter() - started)


# -- metrics ------------------------------------------------------------------------


@dataclass
class KindStats:
    kind: str
    attempts: int = 0
    no_candidate: int = 0
    duplicates: int = 0
    tested_statements: int = 0
    tested_ratio: float = 0.0
    candidates: int = 0
    variants: int = 0
    variant_ratio: float = 0.0
    compilable: int = 0
    compile_ratio: float = 0.0
    sosies: int = 0
    degenerated: int = 0
    ill_formed: int = 0
    sosie_density: float = 0.0


COUNT_FIELDS = ("attempts", "no_candidate", "duplicates", "tested_statements", "candidates",
                "variants", "compilable", "sosies", "degenerated", "ill_formed")


def _ratio(a, b) -> float:
    return a / b if b else 0.0


@dataclass
class CampaignReport:
    program: str
    provenance: dict
    program_statements: int
    eligible_points: int
    kinds: list
    totals: KindStats
    # wall-clock figures; kept out of report.json
    eval_seconds: dict = field(default_factory=dict)

    def sosies_per_hour(self, kind: Optional[str] = None) -> float:
        if kind is None:
            sosies, seconds = self.totals.sosies, sum(self.eval_seconds.values())
        else:
            sosies = next(k.sosies for k in self.kinds if k.kind == kind)
            seconds = self.eval_seconds.get(kind, 0.0)
        return sosies / (seconds / 3600.0) if seconds > 0 else 0.0

    def to_json(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "program": self.program,
            "provenance": self.provenance,
            "program_statements": self.program_statements,
            "eligible_points": self.eligible_points,
            "kinds": [asdict(k) for k in self.kinds],
            "totals": asdict(self.totals),
        }

    def timing_json(self) -> dict:
        return {
            "note": "indicative: measured wall time on this machine",
            "kinds": {
                k.kind: {"eval_seconds": self.eval_seconds.get(k.kind, 0.0),
                         "sosies_per_hour": self.sosies_per_hour(k.kind)}
                for k in self.kinds
            },
            "totals": {"eval_seconds": sum(self.eval_seconds.values()),
                       "sosies_per_hour": self.sosies_per_hour()},
        }


def compute_metrics(outcomes, timings: dict, *, program: Program, index: ReactionIndex,
                    eligible: int, kinds=KINDS, attempts=None, no_candidate=None,
                    duplicates=None, tested_points=None, provenance=None,
                    name: str = "") -> CampaignReport:
    """Aggregate variant outcomes into per-kind and total statistics.

    ``timings`` maps kind -> evaluation seconds; it only feeds sosies/h.
    """
    attempts = attempts or {}
    no_candidate = no_candidate or {}
    duplicates = duplicates or {}
    if tested_points is None:
        tested_points = {}
        for o in outcomes:
            tested_points.setdefault(o.record.kind, set()).add(o.record.point)
    rows = []
    for kind in kinds:
        mine = [o for o in outcomes if o.record.kind == kind]
        points = sorted(tested_points.get(kind, ()))
        s = KindStats(kind)
        s.attempts = attempts.get(kind, len(mine))
        s.no_candidate = no_candidate.get(kind, 0)
        s.duplicates = duplicates.get(kind, 0)
        s.tested_statements = len(points)
        s.tested_ratio = _ratio(len(points), eligible)
        s.candidates = count_candidates(kind, points, index, program)
        s.variants = len(mine)
        s.variant_ratio = _ratio(s.variants, s.candidates)
        s.sosies = sum(1 for o in mine if o.cls == SOSIE)
        s.degenerated = sum(1 for o in mine if o.cls == DEGENERATED)
        s.ill_formed = sum(1 for o in mine if o.cls == ILL_FORMED)
        s.compilable = s.sosies + s.degenerated
        s.compile_ratio = _ratio(s.compilable, s.variants)
        s.sosie_density = _ratio(s.sosies, s.variants)
        rows.append(s)
    totals = KindStats("total")
    for f in COUNT_FIELDS:
        setattr(totals, f, sum(getattr(r, f) for r in rows))
    all_points = set().union(*(set(tested_points.get(k, ())) for k in kinds)) if kinds else set()
    totals.tested_statements = len(all_points)
    totals.tested_ratio = _ratio(len(all_points), eligible)
    totals.variant_ratio = _ratio(totals.variants, totals.candidates)
    totals.compile_ratio = _ratio(totals.compilable, totals.variants)
    totals.sosie_density = _ratio(totals.sosies, totals.variants)
    return CampaignReport(
        program=name,
        provenance=provenance or {},
        program_statements=len(program.app_sids),
        eligible_points=eligible,
        kinds=rows,
        totals=totals,
        eval_seconds={k: timings.get(k, 0.0) for k in kinds},
    )


# -- persistence --------------------------------------------------------------------------


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def persist_variant(outcome: VariantOutcome, variant: Program, directory) -> Path:
    """Store source, record and classification of one variant in ``directory``."""
    d = Path(directory)
    try:
        d.mkdir(parents=True, exist_ok=True)
        (d / "program.mini").write_text(pretty_print(variant), encoding="utf-8")
        (d / "record.json").write_text(outcome.record.dumps(), encoding="utf-8")
        _write_json(d / "outcome.json", outcome.to_json())
    except OSError as exc:
        raise OSError(f"cannot persist variant to {d}: {exc}") from exc
    return d


def write_report(report: CampaignReport, directory) -> Path:
    from .plotting import density_figure
    from .report import write_csv

    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    _write_json(d / "report.json", report.to_json())
    _write_json(d / "timing.json", report.timing_json())
    write_csv(report.to_json(), report.timing_json(), d / "report.csv")
    density_figure(report.to_json(), d / "density.png")
    return d / "report.json"


# -- campaign ------------------------------------------------------------------------------

_WORKER: dict = {}


def _worker_init(program: Program, tests: list, fuel: int) -> None:
    _WORKER.update(program=program, tests=tests, fuel=fuel)


def _evaluate(record: TransformationRecord) -> VariantOutcome:
    variant = apply(_WORKER["program"], record)
    return classify_variant(variant, _WORKER["tests"], _WORKER["fuel"], record)


@dataclass
class CampaignResult:
    report: CampaignReport
    outcomes: list
    program: Program
    stored: list = field(default_factory=list)


def run_campaign(config: CampaignConfig) -> CampaignResult:
    """Run a budgeted campaign; deterministic for a given seed and attempt budget."""
    config.validate()
    program = validate_baseline(config.corpus, config.fuel)
    name = resolve(config.corpus).name
    tests = program.test_names
    coverage = coverage_of_suite(program, config.fuel)
    index = ReactionIndex(program)
    points = eligible_points(program, coverage, index)
    if not points:
        log.warning("%s: no eligible transplantation points", name)

    rng = random.Random(config.seed)
    kinds = [k for k in KINDS if k in config.kinds]
    attempts = {k: 0 for k in kinds}
    no_candidate = {k: 0 for k in kinds}
    duplicates = {k: 0 for k in kinds}
    tested = {k: set() for k in kinds}
    seen = set()

    def rounds():
        used = 0
        while used < config.budget and points:
            point = points[rng.randrange(len(points))]
            batch = []
            for kind in kinds:
                if used >= config.budget:
                    break
                used += 1
                attempts[kind] += 1
                try:
                    record = select_transplant(kind, point, program, index, rng)
                except NoCandidate:
                    no_candidate[kind] += 1
                    continue
                tested[kind].add(point)
                if record.key in seen:
                    duplicates[kind] += 1
                    continue
                seen.add(record.key)
                batch.append(record)
            yield batch

    outcomes = []
    started = time.monotonic()
    pool = None
    if config.workers > 1:
        pool = ProcessPoolExecutor(config.workers, initializer=_worker_init,
                                   initargs=(program, tests, config.fuel))
    else:
        _worker_init(program, tests, config.fuel)
    try:
        pending = []
        for batch in rounds():
            pending.extend(batch)
            if pool is not None and len(pending) < 64:
                continue
            if pool is not None:
                outcomes.extend(pool.map(_evaluate, pending, chunksize=8))
            else:
                outcomes.extend(_evaluate(r) for r in pending)
            pending = []
            if config.max_seconds is not None and time.monotonic() - started > config.max_seconds:
                break
        if pending:
            outcomes.extend(pool.map(_evaluate, pending) if pool else (_evaluate(r) for r in pending))
    finally:
        if pool is not None:
            pool.shutdown()

    timings = {k: 0.0 for k in kinds}
    for o in outcomes:
        timings[o.record.kind] += o.seconds
    provenance = {
        "seed": config.seed,
        "budget": config.budget,
        "kinds": kinds,
        "fuel": config.fuel,
        "config_hash": config.fingerprint(),
        "corpus_hash": corpus_hash(config.corpus),
    }
    report = compute_metrics(
        outcomes, timings, program=program, index=index, eligible=len(points), kinds=kinds,
        attempts=attempts, no_candidate=no_candidate, duplicates=duplicates,
        tested_points=tested, provenance=provenance, name=name,
    )
    result = CampaignResult(report, outcomes, program)
    if config.out is not None:
        root = Path(config.out) / name
        counters = {k: 0 for k in kinds}
        for o in outcomes:
            if o.cls != SOSIE and not config.keep_all:
                continue
            kind = o.record.kind
            path = root / kind / str(counters[kind])
            counters[kind] += 1
            result.stored.append(persist_variant(o, apply(program, o.record), path))
        write_report(report, root)
    return result
