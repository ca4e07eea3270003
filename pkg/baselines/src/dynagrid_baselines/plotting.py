"""Learning-curve figures from curve.jsonl logs."""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

METRICS = (("succ", "success rate"), ("r_avg", "average reward"), ("n_epi", "episode steps"))


def read_curve(path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def plot_curves(curve_paths: list[str], labels: list[str], out_path: str) -> str:
    fig, axes = plt.subplots(1, len(METRICS), figsize=(5 * len(METRICS), 4))
    for path, label in zip(curve_paths, labels):
        records = read_curve(path)
        frames = [r["frames"] for r in records]
        for ax, (key, title) in zip(axes, METRICS):
            means = [r[key][0] for r in records]
            errs = [r[key][1] for r in records]
            ax.plot(frames, means, label=label)
            ax.fill_between(
                frames,
                [m - e for m, e in zip(means, errs)],
                [m + e for m, e in zip(means, errs)],
                alpha=0.2,
            )
    for ax, (key, title) in zip(axes, METRICS):
        ax.set_xlabel("frames")
        ax.set_title(title)
        ax.grid(alpha=0.3)
    axes[0].legend()
    fig.tight_layout()
    Path(out_path).parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path
