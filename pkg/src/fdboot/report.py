"""Figure rendering for experiment outputs.

Reads the flat CSV files the harness writes (or takes result rows directly)
and saves matplotlib figures next to them.  The experiment engine itself
only emits CSV; everything visual lives here.
"""

from __future__ import annotations

import csv
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

__all__ = ["load_rows", "render_distance_curves", "render_std_chart", "render_directory"]

_METHOD_STYLE = {
    "mpb": dict(color="tab:red", marker="x", label="multiplicative"),
    "cbp": dict(color="tab:blue", marker="o", label="convolved blocks"),
    "hpb": dict(color="tab:green", marker="s", label="hybrid"),
}


def load_rows(csv_path) -> list:
    with open(csv_path, newline="") as fh:
        return list(csv.DictReader(fh))


def _group(rows, keys):
    grouped = defaultdict(list)
    for row in rows:
        grouped[tuple(row[k] for k in keys)].append(row)
    return grouped


def render_distance_curves(rows, out_dir, stem="d1") -> list:
    """One figure per (model, n): mean distance against block length per method."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for (model, n), group in sorted(_group(rows, ("model", "n")).items()):
        fig, ax = plt.subplots(figsize=(5.0, 3.6))
        for method in ("cbp", "hpb"):
            pts = sorted((int(r["b"]), float(r["mean_d1"]), float(r["se_d1"]))
                         for r in group if r["method"] == method and r["b"] != "")
            if not pts:
                continue
            bs, means, ses = zip(*pts)
            style = _METHOD_STYLE[method]
            ax.errorbar(bs, means, yerr=ses, capsize=2, **style)
        flat = [r for r in group if r["method"] == "mpb"]
        if flat:
            level = float(flat[0]["mean_d1"])
            ax.axhline(level, linestyle="--", **{k: v for k, v in _METHOD_STYLE["mpb"].items()
                                                 if k in ("color", "label")})
        ax.set_xlabel("block length b")
        ax.set_ylabel("mean Wasserstein-1 distance")
        ax.set_title(f"Model {model}, n = {n}")
        ax.legend(frameon=False, fontsize=8)
        fig.tight_layout()
        path = out_dir / f"{stem}_model{model}_n{n}.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    return written


def render_std_chart(rows, out_dir, stem="std") -> list:
    """One figure per model: bootstrap standard-deviation estimates against b per n."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for (model,), group in sorted(_group(rows, ("model",)).items()):
        fig, ax = plt.subplots(figsize=(5.0, 3.6))
        for (n,), sub in sorted(_group(group, ("n",)).items(), key=lambda kv: int(kv[0][0])):
            pts = sorted((int(r["b"]), float(r["mean"]), float(r["std"])) for r in sub)
            bs, means, stds = zip(*pts)
            line = ax.errorbar(bs, means, yerr=stds, marker="o", capsize=2, label=f"n = {n}")
            ax.axhline(float(sub[0]["est_exact"]), linestyle=":",
                       color=line.lines[0].get_color(), linewidth=1)
        ax.set_xlabel("block length b")
        ax.set_ylabel("bootstrap standard deviation")
        ax.set_title(f"Model {model} (dotted: reference)")
        ax.legend(frameon=False, fontsize=8)
        fig.tight_layout()
        path = out_dir / f"{stem}_model{model}.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    return written


def render_directory(directory) -> list:
    """Render figures for every experiment CSV found in a directory."""
    directory = Path(directory)
    written = []
    for csv_path in sorted(directory.glob("*.csv")):
        rows = load_rows(csv_path)
        if not rows:
            continue
        if "mean_d1" in rows[0]:
            written.extend(render_distance_curves(rows, directory, stem=csv_path.stem))
        elif "est_exact" in rows[0]:
            written.extend(render_std_chart(rows, directory, stem=csv_path.stem))
    return written
