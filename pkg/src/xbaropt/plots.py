"""Figure rendering for experiment CSVs.

All figures are written as SVG (self-contained vector graphics) next to
the delimited output.  The dispatcher inspects the summary CSV and emits
whichever figures its columns support.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .errors import MissingColumn
from .harness import SUMMARY_COLUMNS, read_csv

SPECIES_COLORS = {"setosa": "tab:blue", "versicolor": "tab:orange", "virginica": "tab:green"}


def _require(rows, columns):
    have = set(rows[0].keys()) if rows else set()
    for col in columns:
        if rows and col not in have:
            raise MissingColumn(col)


def _empty_figure(title, out_path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.set_title(f"{title} (no data)")
    ax.text(0.5, 0.5, "empty CSV", ha="center", va="center", transform=ax.transAxes)
    fig.savefig(out_path)
    plt.close(fig)


def plot_error_vs_variation(rows, out_path, metric="rel_error"):
    """One error curve per problem size, error against variation level."""
    _require(rows, ["size", "variation", "metric", "mean_value"])
    rows = [r for r in rows if r["metric"] == metric]
    if not rows:
        _empty_figure("error vs variation", out_path)
        return
    fig, ax = plt.subplots(figsize=(6, 4))
    sizes = sorted({int(r["size"]) for r in rows})
    for size in sizes:
        pts = sorted(
            ((float(r["variation"]), float(r["mean_value"])) for r in rows if int(r["size"]) == size)
        )
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=f"size {size}")
    ax.set_xlabel("hardware variation level")
    ax.set_ylabel(f"mean {metric}")
    ax.set_title("Solution error vs hardware variation")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)


def plot_iterations_vs_rho(trial_rows, out_path):
    """Iteration count distribution per rho value (median + spread)."""
    _require(trial_rows, ["rho", "iters", "metric"])
    rows = [r for r in trial_rows if r["metric"] in ("rel_error", "support_error")]
    if not rows:
        _empty_figure("iterations vs rho", out_path)
        return
    fig, ax = plt.subplots(figsize=(6, 4))
    rhos = sorted({float(r["rho"]) for r in rows})
    data = [[int(r["iters"]) for r in rows if float(r["rho"]) == rho] for rho in rhos]
    ax.boxplot(data, tick_labels=[str(r) for r in rhos])
    ax.set_xlabel("rho")
    ax.set_ylabel("iterations to tolerance")
    ax.set_yscale("log")
    ax.set_title("Convergence vs penalty parameter")
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)


def plot_recovered_stem(truth, recovered, out_path):
    """Stem plot of a recovered sparse signal against the original."""
    fig, ax = plt.subplots(figsize=(8, 4))
    idx = np.arange(len(truth))
    ax.stem(idx, truth, linefmt="C0-", markerfmt="C0o", basefmt=" ", label="original")
    ax.stem(idx, recovered, linefmt="C1--", markerfmt="C1x", basefmt=" ", label="recovered")
    ax.set_xlabel("index")
    ax.set_ylabel("amplitude")
    ax.set_title("Sparse signal recovery")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)


def plot_pca_scatter(scores, labels, out_path):
    """2D score scatter colored by class label."""
    scores = np.asarray(scores, dtype=float)
    fig, ax = plt.subplots(figsize=(6, 5))
    labels = list(labels) if labels is not None else [""] * len(scores)
    for label in sorted(set(labels)):
        mask = np.array([lab == label for lab in labels])
        ax.scatter(scores[mask, 0], scores[mask, 1],
                   color=SPECIES_COLORS.get(label), label=label or None, s=18)
    ax.set_xlabel("PC 1")
    ax.set_ylabel("PC 2")
    ax.set_title("PCA scores")
    if any(labels):
        ax.legend()
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)


def emit_plots(summary_csv, out_dir, trials_csv=None) -> list[Path]:
    """Render every figure the CSV columns support; returns paths written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = read_csv(summary_csv)
    written = []
    if rows:
        _require(rows, SUMMARY_COLUMNS)
    for metric, name in (("rel_error", "error_vs_variation"), ("support_error", "support_error_vs_variation")):
        if not rows or any(r["metric"] == metric for r in rows):
            path = out / f"{name}.svg"
            plot_error_vs_variation(rows, path, metric=metric)
            written.append(path)
            if not rows:
                break
    if trials_csv is not None:
        trial_rows = read_csv(trials_csv)
        path = out / "iterations_vs_rho.svg"
        plot_iterations_vs_rho(trial_rows, path)
        written.append(path)
    return written
