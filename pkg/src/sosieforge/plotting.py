"""Figures written next to the delimited reports."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

# fixed metadata keeps the PNG bytes stable between runs
_META = {"Software": None}


def density_figure(report: dict, path) -> Path:
    """Compile rate and sosie density per transformation kind."""
    rows = report["kinds"]
    names = [r["kind"].replace("_", "\n") for r in rows]
    xs = range(len(rows))
    fig, ax = plt.subplots(figsize=(max(4, 1.1 * len(rows)), 3.6))
    ax.bar([x - 0.2 for x in xs], [100 * r["compile_ratio"] for r in rows], 0.4, label="compilable")
    ax.bar([x + 0.2 for x in xs], [100 * r["sosie_density"] for r in rows], 0.4, label="sosie density")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(names, fontsize=7)
    ax.set_ylabel("% of variants")
    ax.set_ylim(0, 100)
    ax.set_title(report["program"])
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, metadata=_META)
    plt.close(fig)
    return path


def diversity_figure(report: dict, path, title: str = "") -> Path:
    labels = ["any", "call", "variable"]
    values = [report["pct_any"], report["pct_call"], report["pct_variable"]]
    fig, ax = plt.subplots(figsize=(3.6, 3.2))
    ax.bar(labels, values, color=["tab:gray", "tab:blue", "tab:orange"])
    ax.set_ylim(0, 100)
    ax.set_ylabel(f"% of {report['pool_size']} sosies")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, metadata=_META)
    plt.close(fig)
    return path
