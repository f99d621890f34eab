"""Figure rendering for bench reports.

Convenience companions to the CSV/JSON reports: a parameter-landscape
heatmap (full scan plus one panel per threshold), reference-vs-computed
table curves, and the inverse-discrepancy staircase.  All figures are
written to files; nothing here is needed by the numeric pipeline.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_METHOD_STYLE = {
    "sobol": ("tab:gray", "o"),
    "cmaes": ("tab:red", "s"),
    "i_200": ("tab:blue", "^"),
    "i_1500": ("tab:green", "v"),
    "i_2500": ("tab:purple", "D"),
    "l2_subset": ("tab:orange", "x"),
}


def _style(method: str):
    return _METHOD_STYLE.get(method, ("black", "."))


def plot_heatmap(report: dict, path: str | Path) -> Path:
    """Render the (p2, p3) landscape scan: full grid plus threshold panels."""
    res = report["resolution"]
    vals = np.array([v for (_, _, v) in report["rows"]]).reshape(res, res)
    thresholds = sorted(report["threshold_counts"], reverse=True)
    npanels = 1 + len(thresholds)
    fig, axes = plt.subplots(1, npanels, figsize=(4.2 * npanels, 4.0), squeeze=False)
    extent = (0.0, 1.0, 0.0, 1.0)
    for ax, thr in zip(axes[0], [None] + thresholds):
        shown = vals if thr is None else np.where(vals <= thr, vals, np.nan)
        im = ax.imshow(shown.T, origin="lower", extent=extent, aspect="equal", cmap="viridis")
        ax.set_xlabel("p2")
        ax.set_ylabel("p3")
        title = f"n={report['n']}, all cells" if thr is None else f"value <= {thr}"
        ax.set_title(title)
        fig.colorbar(im, ax=ax, shrink=0.8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_table_report(report: dict, path: str | Path) -> Path:
    """Computed vs reference discrepancy per column, log-log over n."""
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    by_col: dict[str, list] = {}
    for cell in report["cells"]:
        by_col.setdefault(cell["column"], []).append(cell)
    for col, cells in sorted(by_col.items()):
        cells = sorted(cells, key=lambda c: c["n"])
        ns = [c["n"] for c in cells]
        color, marker = _style(col)
        ax.loglog(ns, [c["computed"] for c in cells], color=color, marker=marker,
                  markersize=4, label=f"{col} computed")
        ref = [(c["n"], c["reference"]) for c in cells if c["reference"] is not None]
        if ref:
            ax.loglog([r[0] for r in ref], [r[1] for r in ref], color=color,
                      linestyle="--", alpha=0.6, label=f"{col} reference")
    ax.set_xlabel("n")
    ax.set_ylabel("star discrepancy")
    ax.legend(fontsize=7)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_inverse(result: dict, path: str | Path) -> Path:
    """Points needed per method to reach each discrepancy target.

    The x axis shows the inverse of the target, so harder targets sit to
    the right.
    """
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for method in sorted(result):
        pairs = [(1.0 / t, n) for t, n in result[method].items() if n is not None and t > 0]
        if not pairs:
            continue
        pairs.sort()
        color, marker = _style(method)
        ax.semilogx([p[0] for p in pairs], [p[1] for p in pairs], color=color,
                    marker=marker, markersize=4, label=method)
    ax.set_xlabel("1 / target discrepancy")
    ax.set_ylabel("points required")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_interval_matrix(matrix: list[dict], path: str | Path) -> Path:
    """Cross-evaluation curves: each tuned config over every probe size."""
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    by_config: dict[str, list] = {}
    for row in matrix:
        by_config.setdefault(row["config"], []).append((row["n"], row["value"]))
    for config, pts in sorted(by_config.items()):
        pts.sort()
        style = {"linestyle": "--", "color": "black"} if config == "random_baseline" else {}
        ax.loglog([p[0] for p in pts], [p[1] for p in pts], marker=".", label=config, **style)
    ax.set_xlabel("n")
    ax.set_ylabel("star discrepancy")
    ax.legend(fontsize=7)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
