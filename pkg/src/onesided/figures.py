"""Figure rendering for reports (headless, file-output only)."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .reporting import VerificationReport  # noqa: E402

__all__ = [
    "render_report_figure",
    "render_scan_figure",
    "render_sweep_figure",
    "render_overview_figure",
    "render_series_figure",
    "figure_for_report",
]


def _finite_ratios(report: VerificationReport) -> list[float]:
    return [r.ratio for r in report.records if math.isfinite(r.ratio)]


def _maybe_log(ax, values: list[float], axis: str = "y") -> None:
    pos = [v for v in values if v > 0.0]
    if pos and max(pos) / min(pos) > 1e3:
        (ax.set_yscale if axis == "y" else ax.set_xscale)("log")


def render_report_figure(report: VerificationReport, path: Path) -> Path:
    """Per-case ratio strip with the supremum marked."""
    ratios = _finite_ratios(report)
    fig, ax = plt.subplots(figsize=(7.0, 3.2))
    if ratios:
        ax.plot(range(len(ratios)), ratios, "o", ms=4, alpha=0.8)
        ax.axhline(report.sup_ratio, color="crimson", lw=1, ls="--")
        _maybe_log(ax, ratios)
    ax.set_xlabel("case index")
    ax.set_ylabel("ratio")
    ax.set_title(f"{report.name} — sup {report.sup_ratio:.4g}")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def render_scan_figure(report: VerificationReport, path: Path) -> Path:
    """Set measure vs ratio scatter for the weight-condition scan."""
    xs, ys, restricted = [], [], []
    for r in report.records:
        if not math.isfinite(r.ratio):
            continue
        xs.append(r.params.get("set_measure", 0.0))
        ys.append(r.ratio)
        restricted.append(bool(r.params.get("restricted", False)))
    fig, ax = plt.subplots(figsize=(7.0, 3.6))
    for flag, marker, label in ((True, "o", "narrow gap"), (False, "x", "wide gap")):
        px = [x for x, f in zip(xs, restricted) if f == flag]
        py = [y for y, f in zip(ys, restricted) if f == flag]
        if px:
            ax.plot(px, py, marker, ms=5, alpha=0.75, label=label, ls="")
    if xs:
        _maybe_log(ax, xs, axis="x")
        _maybe_log(ax, ys)
        ax.legend(loc="best", fontsize=8)
    ax.set_xlabel("set measure")
    ax.set_ylabel("ratio")
    ax.set_title(f"{report.name} — sup {report.sup_ratio:.4g}")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def render_sweep_figure(report: VerificationReport, path: Path) -> Path:
    """Parameter-sweep line (for example: gamma vs supremum)."""
    xs = report.notes.get("gammas", [])
    ys = report.notes.get("per_gamma_sup", [])
    fig, ax = plt.subplots(figsize=(6.0, 3.2))
    if xs and ys:
        ax.plot(xs, ys, "o-", ms=5)
        ax.set_xscale("log", base=2)
    ax.set_xlabel("gamma")
    ax.set_ylabel("sup ratio")
    ax.set_title(report.name)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def render_series_figure(
    x: Sequence[float], y: Sequence[float], path: Path, title: str, ylabel: str = "value"
) -> Path:
    """Simple x-vs-value curve (operator outputs from the apply path)."""
    fig, ax = plt.subplots(figsize=(7.0, 3.2))
    ax.plot(x, y, lw=1.2)
    ax.set_xlabel("x")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def render_overview_figure(
    labeled: Sequence[tuple[str, VerificationReport]], path: Path
) -> Path:
    """One horizontal bar per check, length = supremum ratio."""
    names = [label for label, _ in labeled]
    sups = [rep.sup_ratio if math.isfinite(rep.sup_ratio) else 0.0 for _, rep in labeled]
    fig, ax = plt.subplots(figsize=(7.0, 0.4 * max(len(names), 4) + 1.2))
    ax.barh(range(len(names)), sups, color="steelblue", alpha=0.85)
    ax.set_yticks(range(len(names)), names, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("sup ratio")
    pos = [s for s in sups if s > 0]
    if pos and max(pos) / min(pos) > 1e3:
        ax.set_xscale("log")
    ax.set_title("supremum ratio per check")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def figure_for_report(label: str, report: VerificationReport, outdir: Path) -> Path:
    """Choose the rendering that matches the report's shape."""
    path = outdir / f"{label}.png"
    if "per_gamma_sup" in report.notes:
        return render_sweep_figure(report, path)
    if report.records and "set_measure" in report.records[0].params:
        return render_scan_figure(report, path)
    return render_report_figure(report, path)
