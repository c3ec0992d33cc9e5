"""Figure rendering for benchmark reports.

Renders per-method summary figures next to the delimited output: quality
ratios of the starting points, iteration counts, and wall-clock times.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def _by_method(records):
    methods = []
    for r in records:
        if r.method not in methods:
            methods.append(r.method)
    return {m: [r for r in records if r.method == m] for m in methods}


def render_bench_figures(records, out_prefix: str) -> list[str]:
    """Write the three summary figures and return their paths."""
    groups = _by_method(records)
    methods = list(groups)
    paths = []

    fig, ax = plt.subplots(figsize=(6, 4))
    data = [
        [r.delta_init for r in groups[m] if not math.isnan(r.delta_init)] for m in methods
    ]
    ax.boxplot(data, tick_labels=methods, showfliers=True)
    ax.set_yscale("log")
    ax.set_ylabel("initial error / best final error")
    ax.set_title("Quality of the starting point by method")
    fig.tight_layout()
    path = f"{out_prefix}.init_quality.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    paths.append(path)

    fig, ax = plt.subplots(figsize=(6, 4))
    data = [[r.iters for r in groups[m]] for m in methods]
    ax.boxplot(data, tick_labels=methods, showfliers=True)
    ax.set_ylabel("sweeps to convergence")
    ax.set_title("Iteration counts by method")
    fig.tight_layout()
    path = f"{out_prefix}.iterations.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    paths.append(path)

    fig, ax = plt.subplots(figsize=(6, 4))
    means = [sum(r.time_s for r in groups[m]) / max(len(groups[m]), 1) for m in methods]
    maxima = [max((r.time_s for r in groups[m]), default=0.0) for m in methods]
    x = range(len(methods))
    ax.bar([i - 0.2 for i in x], means, width=0.4, label="mean")
    ax.bar([i + 0.2 for i in x], maxima, width=0.4, label="max")
    ax.set_xticks(list(x))
    ax.set_xticklabels(methods)
    ax.set_ylabel("seconds (init + iteration)")
    ax.set_title("Wall-clock time by method")
    ax.legend()
    fig.tight_layout()
    path = f"{out_prefix}.time.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    paths.append(path)
    return paths
