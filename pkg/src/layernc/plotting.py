"""Matplotlib figures written next to the CLI's JSON/TSV reports."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .analysis import MincutReport  # noqa: E402
from .netgraph import SISO  # noqa: E402
from .transform import LayeredNetwork  # noqa: E402


def plot_layered(lnet: LayeredNetwork, path, title: str | None = None):
    """Draw nodes column-by-layer; inserted SISO relays in gray."""
    net = lnet.network
    pos = {net.source: (0.0, 0.0)}
    for l in range(1, lnet.L + 1):
        col = lnet.layer_nodes(l)
        for i, v in enumerate(col):
            pos[v] = (float(l), (len(col) - 1) / 2.0 - i)
    dests = [d.node for d in net.destinations]
    for i, d in enumerate(dests):
        pos[d] = (lnet.L + 1.0, (len(dests) - 1) / 2.0 - i)

    fig, ax = plt.subplots(figsize=(1.6 * (lnet.L + 2), 1.0 + 0.8 * max(lnet.sizes + [len(dests), 1])))
    for e in net.edges:
        (x0, y0), (x1, y1) = pos[e.tail], pos[e.head]
        ax.annotate("", xy=(x1, y1), xytext=(x0, y0),
                    arrowprops=dict(arrowstyle="->", lw=0.8, color="0.3", shrinkA=9, shrinkB=9))
    for v, (x, y) in pos.items():
        siso = net.node(v).kind == SISO
        ax.scatter([x], [y], s=320, zorder=3, color="0.75" if siso else "white", edgecolors="black")
        ax.text(x, y, "" if siso else v, ha="center", va="center", fontsize=7, zorder=4)
    ax.set_xticks(range(lnet.L + 2))
    ax.set_xticklabels(["S"] + [f"l={l}" for l in range(1, lnet.L + 1)] + ["D"])
    ax.set_yticks([])
    for side in ("left", "right", "top"):
        ax.spines[side].set_visible(False)
    ax.set_title(title or f"L = {lnet.L}, n_l = {lnet.sizes}")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_mincut(report: MincutReport, path):
    """Per-factor generic ranks with the estimate and max-flow overlaid."""
    fig, ax = plt.subplots(figsize=(max(4.0, 0.7 * len(report.layer_ranks) + 2), 3.2))
    xs = range(len(report.layer_ranks))
    ax.bar(xs, report.layer_ranks, color="0.8", edgecolor="black", label="structural rank")
    ax.axhline(report.maxflow, color="tab:blue", ls="--", label=f"max-flow = {report.maxflow}")
    ax.axhline(report.estimate, color="tab:red", ls=":", label=f"rank estimate = {report.estimate}")
    ax.set_xticks(list(xs))
    ax.set_xticklabels([f"A{l + 1},{l}" for l in xs], fontsize=8)
    ax.set_ylabel("rank")
    ax.set_title(f"{report.destination}: bound {report.upper_bound}, q = {report.q}")
    ax.legend(fontsize=7, loc="upper right")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
