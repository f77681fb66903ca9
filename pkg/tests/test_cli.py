import json
import shutil

import pytest

from sosieforge.cli import EXIT_CONFIG, EXIT_CORPUS, EXIT_IO, main, read_config, ConfigError
from sosieforge.corpus import corpus_check, resolve


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_corpus_check_bundled(capsys):
    code, out, _ = run(capsys, "corpus-check")
    assert code == 0
    assert out.count(": ok") == 3


def test_low_coverage_rejected(tmp_path, capsys):
    root = tmp_path / "half"
    (root / "src").mkdir(parents=True)
    (root / "tests").mkdir()
    (root / "src" / "a.mini").write_text(
        "fn used() -> int { return 1; }\n"
        "fn unused(x: int) -> int { let y: int = x; y = y + 1; return y; }\n")
    (root / "tests" / "t.mini").write_text("fn test_used() { assert(used() == 1); }\n")
    check = corpus_check(root)
    assert not check.ok and check.coverage == 0.25
    assert any("coverage" in d for d in check.diagnostics)
    assert corpus_check(root, threshold=0.2).ok
    code, out, _ = run(capsys, "corpus-check", "--corpus", str(root))
    assert code == EXIT_CORPUS and "REJECTED" in out


def test_failing_test_rejected(tmp_path, capsys):
    root = tmp_path / "red"
    shutil.copytree(resolve("demo"), root)
    t = root / "tests" / "test_stats.mini"
    t.write_text(t.read_text().replace("== 6", "== 7", 1))
    code, out, _ = run(capsys, "corpus-check", "--corpus", str(root))
    assert code == EXIT_CORPUS and "test_sum" in out
    code, _, err = run(capsys, "sosiefy", "--corpus", str(root), "--budget", "5", "--out", str(tmp_path / "o"))
    assert code == EXIT_CORPUS and "not green" in err


def test_unparseable_corpus(tmp_path, capsys):
    root = tmp_path / "broken"
    (root / "src").mkdir(parents=True)
    (root / "src" / "a.mini").write_text("fn (")
    code, out, _ = run(capsys, "corpus-check", "--corpus", str(root))
    assert code == EXIT_CORPUS and "a.mini" in out


def test_sosiefy_writes_outputs(tmp_path, capsys):
    code, out, _ = run(capsys, "sosiefy", "--corpus", "demo", "--seed", "4", "--budget", "60", "--out", str(tmp_path))
    assert code == 0 and "density" in out
    root = tmp_path / "demo"
    for name in ("report.json", "report.csv", "timing.json", "density.png"):
        assert (root / name).exists()
    data = json.loads((root / "report.json").read_text())
    assert data["provenance"]["seed"] == 4 and data["provenance"]["budget"] == 60
    assert (root / "report.json").read_text().endswith("}\n")


def test_output_root_from_environment(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("SOSIEFORGE_OUT", str(tmp_path / "env"))
    code, _, _ = run(capsys, "sosiefy", "--corpus", "demo", "--budget", "10")
    assert code == 0 and (tmp_path / "env" / "demo" / "report.json").exists()


def test_config_file_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.conf"
    cfg.write_text("# campaign\ncorpus = demo\nseed = 9\nbudget = 30\nkinds = delete, add-steroid\n"
                   f"out = {tmp_path / 'a'}\n")
    code, _, _ = run(capsys, "sosiefy", "--config", str(cfg), "--budget", "20")
    assert code == 0
    data = json.loads((tmp_path / "a" / "demo" / "report.json").read_text())
    assert data["provenance"]["seed"] == 9
    assert data["provenance"]["budget"] == 20
    assert data["provenance"]["kinds"] == ["delete", "add_steroid"]


def test_bad_config_file(tmp_path, capsys):
    cfg = tmp_path / "bad.conf"
    cfg.write_text("colour = blue\n")
    assert run(capsys, "sosiefy", "--config", str(cfg))[0] == EXIT_CONFIG
    cfg.write_text("budget = lots\n")
    assert run(capsys, "sosiefy", "--config", str(cfg))[0] == EXIT_CONFIG
    with pytest.raises(ConfigError):
        read_config(tmp_path / "missing.conf")


@pytest.mark.parametrize("argv", [
    ["sosiefy", "--corpus", "demo", "--frobnicate"],
    ["sosiefy", "--corpus", "demo", "--kinds", "add_magic"],
    ["sosiefy", "--corpus", "demo", "--budget", "-4"],
    ["sosiefy", "--budget", "3"],
    ["launch"],
    ["diversity", "--corpus", "demo"],
])
def test_configuration_errors(capsys, argv):
    assert run(capsys, *argv)[0] == EXIT_CONFIG


def test_missing_program_is_corpus_error(capsys):
    assert run(capsys, "sosiefy", "--corpus", "no-such-program", "--budget", "3")[0] == EXIT_CORPUS


def test_report_command(tmp_path, capsys):
    run(capsys, "sosiefy", "--corpus", "demo", "--seed", "1", "--budget", "40", "--out", str(tmp_path))
    report = tmp_path / "demo" / "report.json"
    code, out, _ = run(capsys, "report", str(report), "--csv", str(tmp_path / "copy.csv"),
                       "--json", str(tmp_path / "copy.json"), "--figure", str(tmp_path / "f.png"))
    assert code == 0 and "replace-steroid" in out
    assert json.loads((tmp_path / "copy.json").read_text()) == json.loads(report.read_text())
    code, out_csv, _ = run(capsys, "report", str(tmp_path / "copy.csv"))
    assert code == 0 and out_csv == out


def test_report_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"schema": "x"}))
    code, _, err = run(capsys, "report", str(bad))
    assert code == EXIT_IO and "$.schema" in err
    assert run(capsys, "report", str(tmp_path / "absent.json"))[0] == EXIT_IO
    garbage = tmp_path / "g.json"
    garbage.write_text("{")
    assert run(capsys, "report", str(garbage))[0] == EXIT_IO


def test_reactions_dump_both_spellings(capsys, tmp_path):
    code, out, _ = run(capsys, "reactions-dump", "--corpus", "demo")
    assert code == 0
    rows = [json.loads(line) for line in out.splitlines()]
    assert set(rows[0]) == {"stmt_id", "input", "output"}
    assert [r["stmt_id"] for r in rows] == list(range(len(rows)))
    code, out2, _ = run(capsys, "reactions", "dump", "--corpus", "demo", "--seed", "3")
    assert out2 == out


def test_diversity_command(tmp_path, capsys):
    run(capsys, "sosiefy", "--corpus", "demo", "--seed", "2", "--budget", "90", "--out", str(tmp_path))
    target = tmp_path / "div" / "demo.json"
    code, out, _ = run(capsys, "diversity", "--corpus", "demo", "--pool", str(tmp_path / "demo"),
                       "--runs", "3", "--out", str(target))
    assert code == 0 and "sosies:" in out
    data = json.loads(target.read_text())
    assert data["runs"] == 3 and data["pool_size"] == len(data["verdicts"])
    assert target.with_suffix(".csv").exists() and target.with_suffix(".png").exists()
    assert run(capsys, "diversity", "--corpus", "demo", "--pool", str(tmp_path / "nope"))[0] == EXIT_IO
    assert run(capsys, "diversity", "--corpus", "demo", "--pool", str(tmp_path), "--runs", "1")[0] == EXIT_CONFIG


def test_identical_runs_identical_outputs(tmp_path, capsys):
    for d in ("x", "y"):
        run(capsys, "sosiefy", "--corpus", "demo", "--seed", "8", "--budget", "50", "--out", str(tmp_path / d))
    for name in ("report.json", "density.png"):
        assert (tmp_path / "x" / "demo" / name).read_bytes() == (tmp_path / "y" / "demo" / name).read_bytes()
