#!/usr/bin/env python3
"""Render figures from an analysis report produced by ``uncproxy analyze``.

Usage:
    python plots/render.py --report out/report.json --kind reliability --out reliability.png

Kinds:
    reliability       per-model accuracy vs confidence bins with the 45-degree
                      perfect-calibration reference
    bce_percentile    Brier score per uncertainty-percentile group, one line
                      per uncertainty kind
    disagreement_hist density histogram of annotator disagreement
    rejection         accuracy vs kept-coverage, one line per uncertainty kind

The script is read-only over the report and writes exactly one image.
Styling is pinned by ``uncproxy.mplstyle`` so re-rendering the same
report yields byte-identical output. Exit codes: 0 success, 2 usage
error, 3 unreadable report or missing section.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE_SHEET = Path(__file__).resolve().parent / "uncproxy.mplstyle"

KINDS = ("reliability", "bce_percentile", "disagreement_hist", "rejection")

UNCERTAINTY_LABELS = {
    "u_total": "total",
    "u_aleatoric": "aleatoric",
    "u_epistemic": "epistemic",
}

PNG_METADATA = {"Software": "uncproxy-plots"}


class MissingSectionError(Exception):
    pass


def load_report(path: Path) -> dict:
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise MissingSectionError(f"report not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise MissingSectionError(f"report is not valid JSON: {exc}") from None


def _require(report: dict, key: str):
    value = report.get(key)
    if not value:
        raise MissingSectionError(
            f"report has no populated {key!r} section; "
            "re-run the analysis with the data this plot needs"
        )
    return value


def plot_reliability(report: dict, ax, title: str | None):
    models = _require(report, "models")
    ax.plot([0, 1], [0, 1], linestyle="--", color="0.4", linewidth=1.0, label="perfect")
    markers = {"baseline": "o", "uncnet": "s"}
    for name, entry in sorted(models.items()):
        bins = entry.get("calibration", {}).get("bins")
        if not bins:
            raise MissingSectionError(f"model {name!r} carries no reliability bins")
        populated = [b for b in bins if b["count"] > 0]  # empty bins are skipped
        ax.plot(
            [b["avg_confidence"] for b in populated],
            [b["accuracy"] for b in populated],
            marker=markers.get(name, "^"),
            label=name,
        )
    ax.set_xlim(0.0, 1.0)
    ax.set_ylim(0.0, 1.0)
    ax.set_xlabel("mean confidence")
    ax.set_ylabel("accuracy")
    ax.set_title(title or "Reliability diagram")
    ax.legend(loc="upper left")


def plot_bce_percentile(report: dict, ax, title: str | None):
    sections = _require(report, "bce_vs_uncertainty_percentile")
    for kind in ("u_aleatoric", "u_epistemic", "u_total"):
        entries = sections.get(kind)
        if not entries:
            continue
        ax.plot(
            [e["percentile"] for e in entries],
            [e["bce"] for e in entries],
            marker="o",
            label=UNCERTAINTY_LABELS.get(kind, kind),
        )
    ax.set_ylim(bottom=0.0)
    ax.set_xlabel("uncertainty percentile")
    ax.set_ylabel("Brier score")
    ax.set_title(title or "Brier score by uncertainty percentile")
    ax.legend(loc="upper left")


def plot_disagreement_hist(report: dict, ax, title: str | None):
    annotation = _require(report, "annotation")
    hist = annotation.get("histogram")
    if not hist:
        raise MissingSectionError("report has no disagreement histogram")
    edges = hist["bin_edges"]
    densities = hist["densities"]
    widths = [hi - lo for lo, hi in zip(edges, edges[1:])]
    ax.bar(edges[:-1], densities, width=widths, align="edge", edgecolor="white")
    ax.set_xlim(0.0, 1.0)
    ax.set_ylim(bottom=0.0)
    ax.set_xlabel("disagreement probability")
    ax.set_ylabel("density")
    ax.set_title(title or "Annotator disagreement (density)")


def plot_rejection(report: dict, ax, title: str | None):
    curves = _require(report, "rejection_curves")
    for kind in ("u_aleatoric", "u_epistemic", "u_total"):
        points = curves.get(kind)
        if not points:
            continue
        ax.plot(
            [p["coverage"] for p in points],
            [100.0 * p["accuracy"] for p in points],
            marker="o",
            label=UNCERTAINTY_LABELS.get(kind, kind),
        )
    ax.set_ylim(bottom=0.0)
    ax.set_xlabel("coverage (fraction of samples kept)")
    ax.set_ylabel("accuracy (%)")
    ax.set_title(title or "Accuracy under uncertainty-ranked rejection")
    ax.legend(loc="lower left")


RENDERERS = {
    "reliability": plot_reliability,
    "bce_percentile": plot_bce_percentile,
    "disagreement_hist": plot_disagreement_hist,
    "rejection": plot_rejection,
}


def render(report_path, kind: str, out_path, image_format: str | None = None, title: str | None = None):
    """Render one plot kind from a report to ``out_path``."""
    report = load_report(Path(report_path))
    fmt = image_format or Path(out_path).suffix.lstrip(".").lower() or "png"
    if fmt not in ("png", "svg"):
        raise MissingSectionError(f"unsupported image format {fmt!r} (use png or svg)")
    with plt.style.context(str(STYLE_SHEET)):
        fig, ax = plt.subplots()
        try:
            RENDERERS[kind](report, ax, title)
            metadata = dict(PNG_METADATA) if fmt == "png" else {"Date": None}
            fig.savefig(out_path, format=fmt, metadata=metadata, bbox_inches="tight")
        finally:
            plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render.py", description="Render figures from an analysis report."
    )
    parser.add_argument("--report", required=True, help="path to report.json")
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--format", choices=("png", "svg"), default=None,
                        help="image format (default: from --out extension)")
    parser.add_argument("--title", default=None, help="override the plot title")
    args = parser.parse_args(argv)
    try:
        render(args.report, args.kind, args.out, image_format=args.format, title=args.title)
    except MissingSectionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
