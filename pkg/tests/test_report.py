import copy
import json

import pytest

from sosieforge.report import (
    ReportError,
    format_density,
    read_csv,
    render_report,
    validate_report,
    write_csv,
)
from sosieforge.search import CampaignConfig, run_campaign


@pytest.fixture(scope="module")
def report_pair():
    result = run_campaign(CampaignConfig("demo", seed=2, budget=200))
    return result.report.to_json(), result.report.timing_json()


@pytest.mark.parametrize("value,text", [(0.0, "0%"), (0.004, "<1%"), (0.0099, "<1%"), (0.01, "1%"),
                                        (0.125, "13%"), (0.5, "50%"), (1.0, "100%")])
def test_density_format(value, text):
    assert format_density(value) == text


def test_valid_report_passes_schema(report_pair):
    validate_report(report_pair[0])


def test_schema_errors_carry_json_paths(report_pair):
    bad = copy.deepcopy(report_pair[0])
    bad["kinds"][2]["sosies"] = -1
    bad["totals"]["compile_ratio"] = "high"
    del bad["provenance"]["seed"]
    with pytest.raises(ReportError) as info:
        validate_report(bad)
    text = "\n".join(info.value.problems)
    assert "$.kinds[2].sosies" in text
    assert "$.totals.compile_ratio" in text
    assert "$.provenance" in text


def test_csv_round_trip(report_pair, tmp_path):
    report, timing = report_pair
    path = tmp_path / "report.csv"
    write_csv(report, timing, path)
    back, back_timing = read_csv(path)
    assert back == report
    assert json.dumps(back, sort_keys=True) == json.dumps(report, sort_keys=True)
    assert back_timing["totals"] == timing["totals"]
    assert back_timing["kinds"] == timing["kinds"]


def test_csv_has_row_per_kind(report_pair, tmp_path):
    report, timing = report_pair
    path = tmp_path / "r.csv"
    write_csv(report, timing, path)
    lines = path.read_text().splitlines()
    assert len(lines) == 1 + len(report["kinds"]) + 1
    assert lines[-1].split(",")[0] == "demo"


def test_table_column_order(report_pair):
    text = render_report(*report_pair)
    header = text.splitlines()[1].split()
    assert header == ["transformation", "tested", "stmts", "candidates", "variants", "compilable", "sosies",
                      "density", "sosies/h"]
    assert "add-steroid" in text and text.splitlines()[-1].startswith("total")


def test_empty_campaign_renders_zeros():
    report = run_campaign(CampaignConfig("demo", budget=0)).report
    text = render_report(report.to_json(), report.timing_json())
    total = text.splitlines()[-1].split()
    assert total == ["total", "0", "(0%)", "0", "0", "(0%)", "0", "(0%)", "0", "0%", "0"]


def test_figure_written(report_pair, tmp_path):
    from sosieforge.plotting import density_figure, diversity_figure

    png = density_figure(report_pair[0], tmp_path / "d.png")
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    div = {"pool_size": 4, "pct_any": 50.0, "pct_call": 25.0, "pct_variable": 50.0}
    assert diversity_figure(div, tmp_path / "v.png").exists()
