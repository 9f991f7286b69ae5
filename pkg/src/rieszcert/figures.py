"""Figure rendering for campaign outputs.

Reads the delimited plot-data tables written next to the reports and renders
static summaries.  Rendering is best-effort: a campaign that produced no
table for a given figure simply skips it.
"""
from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def _read_table(path: Path) -> tuple[list[str], list[list[str]]]:
    with path.open() as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def render_norm_vs_p(plotdata_dir: Path, fig_dir: Path) -> Path | None:
    src = plotdata_dir / "norm_vs_p.csv"
    if not src.exists():
        return None
    _, rows = _read_table(src)
    by_model: dict[str, list[tuple[float, float]]] = {}
    ceiling: dict[float, float] = {}
    for label, p, norm, ceil in rows:
        by_model.setdefault(label, []).append((float(p), float(norm)))
        ceiling[float(p)] = float(ceil)
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, pts in sorted(by_model.items()):
        pts.sort()
        ax.plot([a for a, _ in pts], [b for _, b in pts], "o-", label=label)
    ps = sorted(ceiling)
    ax.plot(ps, [ceiling[p] for p in ps], "k--", label="12 (p*-1) ceiling")
    ax.set_xlabel("p")
    ax.set_ylabel("ascent lower bound on the transform norm")
    ax.set_yscale("log")
    ax.legend(fontsize=8)
    fig.tight_layout()
    out = fig_dir / "norm_vs_p.png"
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def render_constant_curve(plotdata_dir: Path, fig_dir: Path) -> Path | None:
    src = plotdata_dir / "constant_curve.csv"
    if not src.exists():
        return None
    _, rows = _read_table(src)
    s = [float(r[0]) for r in rows]
    v = [float(r[1]) for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(s, v)
    ax.axhline(3.0, color="k", ls="--", lw=1, label="3")
    ax.set_xlabel("s")
    ax.set_ylabel("(s^2 + s + 8) s^(-s/(s+1)) / 4")
    ax.legend(fontsize=8)
    fig.tight_layout()
    out = fig_dir / "constant_curve.png"
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def render_embedding_ratios(plotdata_dir: Path, fig_dir: Path) -> Path | None:
    src = plotdata_dir / "embedding_ratios.csv"
    if not src.exists():
        return None
    _, rows = _read_table(src)
    ratios = [float(r[3]) for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(ratios, bins=40)
    ax.axvline(1.0, color="k", ls="--", lw=1, label="certified ceiling")
    ax.set_xlabel("achieved / allowed ratio")
    ax.set_ylabel("count")
    ax.legend(fontsize=8)
    fig.tight_layout()
    out = fig_dir / "embedding_ratios.png"
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def render_margin_histogram(report_rows: list[dict], fig_dir: Path) -> Path | None:
    margins = [float(r["margin"]) for r in report_rows]
    if not margins:
        return None
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(margins, bins=30)
    ax.axvline(0.0, color="k", ls="--", lw=1, label="pass/fail line")
    ax.set_xlabel("signed certification margin")
    ax.set_ylabel("checks")
    ax.set_yscale("log")
    ax.legend(fontsize=8)
    fig.tight_layout()
    out = fig_dir / "margins.png"
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def render_all(out_dir: str | Path, report_rows: list[dict]) -> list[Path]:
    out_dir = Path(out_dir)
    plotdata_dir = out_dir / "plotdata"
    fig_dir = out_dir / "figures"
    fig_dir.mkdir(parents=True, exist_ok=True)
    made = []
    for fn in (render_norm_vs_p, render_constant_curve, render_embedding_ratios):
        path = fn(plotdata_dir, fig_dir)
        if path is not None:
            made.append(path)
    path = render_margin_histogram(report_rows, fig_dir)
    if path is not None:
        made.append(path)
    return made
