"""``sosieforge`` command line."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .corpus import BUNDLED, DEFAULT_COVERAGE_THRESHOLD, CorpusError, corpus_check, load_program
from .report import ReportError

log = logging.getLogger("sosieforge")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CORPUS = 3
EXIT_IO = 4

DEFAULT_OUT = "sosieforge-out"

# config-file keys and how to convert them; flags always win over the file
SETTINGS = {
    "corpus": str,
    "seed": int,
    "budget": int,
    "kinds": str,
    "fuel": int,
    "keep_all": lambda v: _bool(v),
    "out": str,
    "runs": int,
    "workers": int,
    "coverage_threshold": float,
    "max_seconds": float,
}
DEFAULTS = {
    "seed": 0,
    "budget": 1000,
    "kinds": "all",
    "fuel": None,  # runtime default
    "keep_all": False,
    "runs": 2,
    "workers": 1,
    "coverage_threshold": DEFAULT_COVERAGE_THRESHOLD,
    "max_seconds": None,
}


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _bool(value: str) -> bool:
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


def read_config(path) -> dict:
    """Parse a ``key = value`` file; ``#`` starts a comment, dashes equal underscores."""
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        value = value.strip().strip('"').strip("'")
        if not sep or key not in SETTINGS:
            raise ConfigError(f"{path}:{n}: unknown setting {key!r}" if sep else f"{path}:{n}: expected key = value")
        try:
            out[key] = SETTINGS[key](value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{n}: {key}: {exc}") from exc
    return out


def settle(args, names) -> dict:
    """Resolve each setting as flag > config file > default."""
    config = read_config(args.config) if getattr(args, "config", None) else {}
    merged = {}
    for name in names:
        flag = getattr(args, name, None)
        if flag is not None and flag is not False:
            merged[name] = flag
        elif name in config:
            merged[name] = config[name]
        elif name == "out":
            merged[name] = os.environ.get("SOSIEFORGE_OUT", DEFAULT_OUT)
        else:
            merged[name] = DEFAULTS.get(name)
    return merged


def parse_kinds(text: str) -> tuple:
    from .transforms import KINDS

    if text.strip() == "all":
        return KINDS
    wanted = [k.strip().replace("-", "_").lower() for k in text.split(",") if k.strip()]
    unknown = [k for k in wanted if k not in KINDS]
    if unknown or not wanted:
        raise ConfigError(f"unknown kinds {unknown}; choose from {', '.join(KINDS)} or 'all'")
    return tuple(k for k in KINDS if k in wanted)


def _write_json(path: Path, data) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")


def _fuel(value):
    from .runtime import DEFAULT_FUEL

    return DEFAULT_FUEL if value is None else value


def _need_corpus(s):
    if not s.get("corpus"):
        raise ConfigError("--corpus is required (a program directory or one of: " + ", ".join(BUNDLED) + ")")


# -- commands -------------------------------------------------------------------


def cmd_sosiefy(args) -> int:
    from .report import render_report
    from .search import CampaignConfig, ConfigError as SearchConfigError, run_campaign

    s = settle(args, ["corpus", "seed", "budget", "kinds", "fuel", "keep_all", "out", "workers", "max_seconds"])
    _need_corpus(s)
    config = CampaignConfig(
        corpus=s["corpus"], seed=s["seed"], budget=s["budget"], kinds=parse_kinds(s["kinds"]),
        fuel=_fuel(s["fuel"]), out=s["out"], keep_all=s["keep_all"], workers=s["workers"],
        max_seconds=s["max_seconds"],
    )
    try:
        result = run_campaign(config)
    except SearchConfigError as exc:
        raise ConfigError(str(exc)) from exc
    report = result.report
    print(render_report(report.to_json(), report.timing_json()), end="")
    where = Path(s["out"]) / report.program
    print(f"{len(result.stored)} variants stored under {where}")
    return EXIT_OK


def cmd_diversity(args) -> int:
    from .diversity import load_pool, measure_diversity, render_diversity_csv
    from .plotting import diversity_figure
    from .report import render_diversity

    s = settle(args, ["corpus", "seed", "fuel", "runs", "workers", "out"])
    _need_corpus(s)
    if s["runs"] < 2:
        raise ConfigError("--runs must be at least 2")
    pool_dir = Path(args.pool)
    if not pool_dir.is_dir():
        raise OSError(f"pool directory not found: {pool_dir}")
    original = load_program(s["corpus"])
    pool = load_pool(pool_dir)
    report = measure_diversity(pool, original, fuel=_fuel(s["fuel"]), runs=s["runs"], workers=s["workers"])
    data = report.to_json()
    data["program"] = Path(s["corpus"]).name
    data["pool"] = pool_dir.as_posix()
    out = Path(args.out) if args.out else Path(s["out"]) / f"{data['program']}-diversity.json"
    _write_json(out, data)
    out.with_suffix(".csv").write_text(render_diversity_csv(report), encoding="utf-8")
    diversity_figure(data, out.with_suffix(".png"), title=data["program"])
    print(render_diversity(data), end="")
    print(f"report written to {out}")
    return EXIT_OK


def cmd_report(args) -> int:
    from .report import load_report, read_csv, render_report, write_csv

    path = Path(args.report)
    if path.suffix == ".csv":
        report, timing = read_csv(path)
    else:
        report = load_report(path)
        timing_file = path.with_name("timing.json")
        timing = json.loads(timing_file.read_text(encoding="utf-8")) if timing_file.exists() else None
    print(render_report(report, timing), end="")
    if args.csv:
        write_csv(report, timing, args.csv)
    if args.json:
        _write_json(Path(args.json), report)
    if args.figure:
        from .plotting import density_figure

        density_figure(report, args.figure)
    return EXIT_OK


def cmd_reactions_dump(args) -> int:
    from .reactions import ReactionIndex

    s = settle(args, ["corpus"])
    _need_corpus(s)
    index = ReactionIndex(load_program(s["corpus"]))
    text = index.dump()
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_corpus_check(args) -> int:
    s = settle(args, ["coverage_threshold", "fuel"])
    targets = args.corpus or list(BUNDLED)
    status = EXIT_OK
    for target in targets:
        check = corpus_check(target, s["coverage_threshold"], _fuel(s["fuel"]))
        verdict = "ok" if check.ok else "REJECTED"
        print(f"{check.program}: {verdict}  statements={check.statements} tests={check.tests} "
              f"coverage={check.coverage:.1%}")
        for d in check.diagnostics:
            print(f"  {d}")
        if not check.ok:
            status = EXIT_CORPUS
    return status


# -- parser --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key = value settings file (flags take precedence)")
    common.add_argument("--seed", type=int, help="RNG seed (default 0)")
    common.add_argument("--fuel", type=int, help="evaluation steps per test")
    common.add_argument("--workers", type=int, help="parallel evaluation processes")

    parser = _Parser(prog="sosieforge", description="Sosie synthesis and diversity measurement for MiniLang.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sosiefy", parents=[common], help="run a budgeted sosiefication campaign")
    p.add_argument("--corpus", help="program directory or bundled name")
    p.add_argument("--budget", type=int, help="transformation attempts (default 1000)")
    p.add_argument("--kinds", help="comma-separated kinds, or 'all'")
    p.add_argument("--keep-all", action="store_true", default=None, help="also store non-sosie variants")
    p.add_argument("--out", help="output root (default $SOSIEFORGE_OUT or ./sosieforge-out)")
    p.add_argument("--max-seconds", type=float, help="optional wall-clock cap; results then depend on speed")
    p.set_defaults(func=cmd_sosiefy)

    p = sub.add_parser("diversity", parents=[common], help="measure call and data diversity of stored sosies")
    p.add_argument("--corpus", help="the original program")
    p.add_argument("--pool", required=True, help="directory of stored sosies")
    p.add_argument("--runs", type=int, help="runs of the original used for the noise mask (default 2)")
    p.add_argument("--out", help="report path (default <out root>/<program>-diversity.json)")
    p.set_defaults(func=cmd_diversity)

    p = sub.add_parser("report", parents=[common], help="render report.json (or report.csv) as a table")
    p.add_argument("report")
    p.add_argument("--csv", help="also write the CSV here")
    p.add_argument("--json", help="also write the (validated) JSON here")
    p.add_argument("--figure", help="also write the density figure here")
    p.set_defaults(func=cmd_report)

    for name in ("reactions-dump", "reactions"):
        p = sub.add_parser(name, parents=[common], help="print statement reactions as JSON lines")
        if name == "reactions":
            p.add_argument("action", choices=["dump"])
        p.add_argument("--corpus")
        p.add_argument("-o", "--output", help="write to a file instead of stdout")
        p.set_defaults(func=cmd_reactions_dump)

    p = sub.add_parser("corpus-check", parents=[common], help="check corpus programs for admission")
    p.add_argument("--corpus", action="append", help="program to check (repeatable; default all bundled)")
    p.add_argument("--coverage-threshold", type=float, help="minimum statement coverage (default 0.70)")
    p.set_defaults(func=cmd_corpus_check)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as exc:
        print(f"sosieforge: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"sosieforge: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CorpusError as exc:
        print(f"sosieforge: corpus error: {exc}", file=sys.stderr)
        for d in exc.diagnostics:
            print(f"  {d}", file=sys.stderr)
        return EXIT_CORPUS
    except ReportError as exc:
        print("sosieforge: invalid report:", file=sys.stderr)
        for problem in exc.problems:
            print(f"  {problem}", file=sys.stderr)
        return EXIT_IO
    except (OSError, json.JSONDecodeError) as exc:
        print(f"sosieforge: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
