"""Figure rendering for run reports: gap-vs-p panels saved as PNG."""

from __future__ import annotations

from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def render_gap_figure(rows, path) -> None:
    """Scatter the signed gap against p for every check that sweeps p.

    One panel per suite; checks without a p value are skipped.  Failed
    verdicts are drawn as red crosses so violations stand out.
    """
    by_suite = defaultdict(list)
    for row in rows:
        if row.get("p") is not None and row.get("gap") is not None:
            by_suite[row["suite"]].append(row)
    suites = sorted(by_suite)
    if not suites:
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.text(0.5, 0.5, "no p-swept checks", ha="center", va="center")
        ax.set_axis_off()
        fig.savefig(path, dpi=120)
        plt.close(fig)
        return
    fig, axes = plt.subplots(
        len(suites), 1, figsize=(7, 2.6 * len(suites)), squeeze=False, sharex=True
    )
    for ax, suite in zip(axes[:, 0], suites):
        by_check = defaultdict(list)
        for row in by_suite[suite]:
            by_check[row["check"]].append(row)
        for check, entries in sorted(by_check.items()):
            ps = [r["p"] for r in entries]
            gaps = [r["gap"] for r in entries]
            ax.scatter(ps, gaps, s=12, label=check, alpha=0.7)
            bad = [(r["p"], r["gap"]) for r in entries if not r["verdict"]]
            if bad:
                ax.scatter(*zip(*bad), s=40, marker="x", color="red")
        ax.axhline(0.0, color="gray", lw=0.8)
        ax.set_yscale("symlog", linthresh=1e-10)
        ax.set_ylabel("gap")
        ax.set_title(suite, fontsize=10)
        ax.legend(fontsize=6, loc="upper right", ncol=2)
    axes[-1, 0].set_xlabel("p")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
