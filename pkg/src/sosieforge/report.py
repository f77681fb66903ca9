"""Campaign report schema, CSV export and human-readable tables."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import jsonschema

from .search import REPORT_SCHEMA
from .transforms import KINDS

_COUNT = {"type": "integer", "minimum": 0}
_RATIO = {"type": "number", "minimum": 0, "maximum": 1}

ROW_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["kind", "attempts", "no_candidate", "duplicates", "tested_statements", "tested_ratio",
                 "candidates", "variants", "variant_ratio", "compilable", "compile_ratio", "sosies",
                 "degenerated", "ill_formed", "sosie_density"],
    "properties": {
        "kind": {"enum": list(KINDS) + ["total"]},
        "attempts": _COUNT,
        "no_candidate": _COUNT,
        "duplicates": _COUNT,
        "tested_statements": _COUNT,
        "tested_ratio": _RATIO,
        "candidates": _COUNT,
        "variants": _COUNT,
        # variants can exceed the precondition-filtered candidate count only if
        # the formula and the generator disagree, so no upper bound here
        "variant_ratio": {"type": "number", "minimum": 0},
        "compilable": _COUNT,
        "compile_ratio": _RATIO,
        "sosies": _COUNT,
        "degenerated": _COUNT,
        "ill_formed": _COUNT,
        "sosie_density": _RATIO,
    },
}

REPORT_JSON_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["schema", "program", "provenance", "program_statements", "eligible_points", "kinds", "totals"],
    "properties": {
        "schema": {"const": REPORT_SCHEMA},
        "program": {"type": "string"},
        "provenance": {
            "type": "object",
            "required": ["seed", "budget", "kinds", "fuel", "config_hash", "corpus_hash"],
            "properties": {
                "seed": _COUNT,
                "budget": _COUNT,
                "kinds": {"type": "array", "items": {"enum": list(KINDS)}},
                "fuel": {"type": "integer", "minimum": 1},
                "config_hash": {"type": "string"},
                "corpus_hash": {"type": "string"},
            },
        },
        "program_statements": _COUNT,
        "eligible_points": _COUNT,
        "kinds": {"type": "array", "items": ROW_SCHEMA},
        "totals": ROW_SCHEMA,
    },
}


class ReportError(ValueError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


def validate_report(data: dict) -> None:
    """Raise ReportError listing every schema violation by JSON path."""
    validator = jsonschema.Draft202012Validator(REPORT_JSON_SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        raise ReportError(f"{e.json_path}: {e.message}" for e in errors)


def load_report(path) -> dict:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    validate_report(data)
    return data


# -- csv ------------------------------------------------------------------------

ROW_FIELDS = list(ROW_SCHEMA["required"])
CSV_FIELDS = ["program", "program_statements", "eligible_points", "provenance"] + ROW_FIELDS + [
    "eval_seconds", "sosies_per_hour"]
_INT_FIELDS = {k for k, v in ROW_SCHEMA["properties"].items() if v is _COUNT} | {"program_statements",
                                                                                  "eligible_points"}
_FLOAT_FIELDS = set(ROW_FIELDS) - _INT_FIELDS - {"kind"} | {"eval_seconds", "sosies_per_hour"}


def _timing_row(timing: dict, kind: str) -> dict:
    if not timing:
        return {"eval_seconds": 0.0, "sosies_per_hour": 0.0}
    return timing["totals"] if kind == "total" else timing["kinds"].get(kind, {"eval_seconds": 0.0,
                                                                               "sosies_per_hour": 0.0})


def write_csv(report: dict, timing: dict, path) -> None:
    """One row per kind plus a ``total`` row; floats are written with full precision."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS, lineterminator="\n")
        writer.writeheader()
        head = {
            "program": report["program"],
            "program_statements": report["program_statements"],
            "eligible_points": report["eligible_points"],
            "provenance": json.dumps(report["provenance"], sort_keys=True),
        }
        for row in report["kinds"] + [report["totals"]]:
            t = _timing_row(timing, row["kind"])
            writer.writerow({**head, **row, "eval_seconds": repr(float(t["eval_seconds"])),
                             "sosies_per_hour": repr(float(t["sosies_per_hour"]))})


def read_csv(path):
    """Inverse of :func:`write_csv`: returns ``(report, timing)``; the report is validated."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ReportError(["$: empty csv"])
    parsed = []
    for raw in rows:
        row = {}
        for k in ROW_FIELDS + ["eval_seconds", "sosies_per_hour"]:
            v = raw[k]
            row[k] = int(v) if k in _INT_FIELDS else float(v) if k in _FLOAT_FIELDS else v
        parsed.append(row)
    first = rows[0]
    strip = lambda r: {k: r[k] for k in ROW_FIELDS}
    report = {
        "schema": REPORT_SCHEMA,
        "program": first["program"],
        "provenance": json.loads(first["provenance"]),
        "program_statements": int(first["program_statements"]),
        "eligible_points": int(first["eligible_points"]),
        "kinds": [strip(r) for r in parsed if r["kind"] != "total"],
        "totals": next(strip(r) for r in parsed if r["kind"] == "total"),
    }
    validate_report(report)
    timing = {
        "kinds": {r["kind"]: {"eval_seconds": r["eval_seconds"], "sosies_per_hour": r["sosies_per_hour"]}
                  for r in parsed if r["kind"] != "total"},
        "totals": next({"eval_seconds": r["eval_seconds"], "sosies_per_hour": r["sosies_per_hour"]}
                       for r in parsed if r["kind"] == "total"),
    }
    return report, timing


# -- rendering --------------------------------------------------------------------------


def format_density(x: float) -> str:
    """Integer percent, with ``<1%`` for nonzero values below one percent."""
    if x <= 0:
        return "0%"
    if x < 0.01:
        return "<1%"
    return f"{math.floor(x * 100 + 0.5)}%"


def _label(kind: str) -> str:
    if kind == "total":
        return "total"
    strategy, _, action = kind.partition("_")
    return f"{strategy}-{action}" if action else strategy


TABLE_HEADER = ("transformation", "tested stmts", "candidates", "variants", "compilable", "sosies",
                "density", "sosies/h")


def render_report(report: dict, timing: dict = None) -> str:
    """Plain-text table; columns follow the usual synthesis-results layout."""
    validate_report(report)
    lines = [f"program: {report['program']}  (statements: {report['program_statements']}, "
             f"eligible points: {report['eligible_points']}, seed: {report['provenance']['seed']})"]
    body = []
    for row in report["kinds"] + [report["totals"]]:
        t = _timing_row(timing or {}, row["kind"])
        body.append((
            _label(row["kind"]),
            f"{row['tested_statements']} ({format_density(row['tested_ratio'])})",
            str(row["candidates"]),
            f"{row['variants']} ({format_density(row['variant_ratio'])})",
            f"{row['compilable']} ({format_density(row['compile_ratio'])})",
            str(row["sosies"]),
            format_density(row["sosie_density"]),
            f"{t['sosies_per_hour']:.0f}" if timing else "n/a",
        ))
    widths = [max(len(r[i]) for r in [TABLE_HEADER] + body) for i in range(len(TABLE_HEADER))]
    fmt = lambda r: "  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(r, widths)))
    lines.append(fmt(TABLE_HEADER))
    lines.append("  ".join("-" * w for w in widths))
    lines.extend(fmt(r) for r in body)
    return "\n".join(lines) + "\n"


def render_diversity(report: dict) -> str:
    n = report["pool_size"]
    lines = [
        f"sosies: {n}",
        f"with diversity: {report['any_diversity']} ({report['pct_any']:.0f}%)",
        f"call diversity: {report['call_diversity']} ({report['pct_call']:.0f}%), "
        f"mean diverse tests {report['mean_tests_call']:.1f}",
        f"variable diversity: {report['variable_diversity']} ({report['pct_variable']:.0f}%), "
        f"mean diverse tests {report['mean_tests_data']:.1f}",
    ]
    if report.get("excluded"):
        lines.append(f"excluded: {len(report['excluded'])}")
    return "\n".join(lines) + "\n"
