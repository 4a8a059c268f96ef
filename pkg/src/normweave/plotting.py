"""Figure rendering for the report-producing CLI paths.

All functions write a file and return its path; matplotlib runs headless.
"""
from __future__ import annotations

import math
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def plot_gap_profile(
    positions: Sequence[int],
    length: int,
    path: str,
    bound_fn=None,
    sigma: str = "sigma",
) -> str:
    """Gap size between consecutive marker occurrences along the stream."""
    xs, ys = [], []
    for a, b in zip(positions, positions[1:]):
        xs.append(a)
        ys.append(b - a - 1)
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.step(xs, ys, where="post", lw=0.8, label="gap")
    if bound_fn is not None and xs:
        grid = [max(x, 3) for x in xs]
        ax.plot(xs, [bound_fn(x) for x in grid], "r--", lw=1.2, label="bound")
    ax.set_xlabel("position")
    ax.set_ylabel(f"symbols between consecutive {sigma}")
    ax.set_title(f"{sigma} gaps over {length} symbols")
    ax.legend(loc="upper left")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_delta_profile(
    entries: Sequence[tuple[int, float]],
    path: str,
    title: str = "aligned-block discrepancy",
) -> str:
    """Discrepancy values per prefix length (log-log)."""
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ns = [n for n, _ in entries]
    ds = [d for _, d in entries]
    ax.loglog(ns, ds, "o-", lw=1.0)
    ax.set_xlabel("prefix length N")
    ax.set_ylabel("delta")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_ps_table(per_len: dict[int, float], alphabet_size: int, path: str) -> str:
    """Per-length maxima of the empirical uniformity statistic."""
    fig, ax = plt.subplots(figsize=(6, 4))
    lens = sorted(per_len)
    ax.bar([str(m) for m in lens], [per_len[m] for m in lens], color="#4878b0")
    ax.axhline(1.0, color="k", lw=0.8, ls=":")
    ax.axhline(alphabet_size, color="r", lw=1.0, ls="--", label="proof constant")
    ax.set_xlabel("word length")
    ax.set_ylabel("max occ * |A|^len / N")
    ax.set_title("block-frequency uniformity statistic")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_star_decay(entries: Sequence[tuple[int, float]], path: str) -> str:
    """Star discrepancy decay against the (log N)^2 / N envelope."""
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ns = [n for n, _ in entries]
    ds = [d for _, d in entries]
    ax.loglog(ns, ds, "o-", lw=1.0, label="D_N")
    if ns:
        scale = ds[0] * ns[0] / math.log(ns[0]) ** 2
        ax.loglog(
            ns,
            [scale * math.log(n) ** 2 / n for n in ns],
            "r--",
            lw=1.0,
            label="(log N)^2 / N envelope",
        )
    ax.set_xlabel("N")
    ax.set_ylabel("star discrepancy")
    ax.set_title("orbit star discrepancy")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
