"""Figure rendering for the CLI report paths (Agg backend, PNG files)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_SAVE_KW = {"dpi": 120, "metadata": {"Software": None}}


def save_curve(path, x, curves: dict, xlabel: str, ylabel: str, title: str) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, y in curves.items():
        ax.plot(x, y, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    if len(curves) > 1:
        ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def save_gap_bars(path, sizes, gaps, threshold: float, title: str) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    shown = [g if np.isfinite(g) and g > 0 else threshold for g in gaps]
    ax.bar([str(s) for s in sizes], shown, color="steelblue")
    ax.axhline(threshold, color="crimson", linestyle="--", label=f"threshold {threshold:g}")
    ax.set_yscale("log")
    ax.set_xlabel("leaves")
    ax.set_ylabel("min pairwise sup-norm gap")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def save_signal(path, t, signals: dict, title: str) -> None:
    fig, axes = plt.subplots(len(signals), 1, figsize=(7.0, 2.2 * len(signals)), squeeze=False)
    for ax, (label, (tt, y)) in zip(axes[:, 0], signals.items()):
        ax.plot(tt, y, linewidth=0.8)
        ax.set_ylabel(label)
        ax.grid(True, alpha=0.3)
    axes[-1, 0].set_xlabel("t")
    axes[0, 0].set_title(title)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
