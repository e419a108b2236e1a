"""Diagnostic figures rendered next to the delimited outputs.

Figures are derived views of data the reports already carry; the
delimited/structured files remain the canonical record. Rendering uses
the Agg backend so headless runs work.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402


def save_score_figure(scores, seg, frame_mask, path: str | os.PathLike) -> None:
    """Frame scores with scene boundaries and the selected frames shaded."""
    values = np.asarray(scores.scores, dtype=np.float64)
    n = values.shape[0]
    fig, ax = plt.subplots(figsize=(8, 3))
    colors = ["#2a7fba" if sel else "#b0b8bf" for sel in frame_mask]
    ax.bar(np.arange(n), values, color=colors, width=0.85)
    ax.axhline(scores.mean, color="#444444", linewidth=1, linestyle="--", label="mean")
    for b in seg.boundaries:
        ax.axvline(b - 0.5, color="#cc5500", linewidth=1)
    ax.set_xlabel("frame")
    ax.set_ylabel("score")
    ax.set_ylim(0, 1)
    ax.set_title("frame scores (selected frames highlighted)")
    ax.legend(loc="upper right")
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)


def save_trace_figure(rows, path: str | os.PathLike) -> None:
    """Loss terms per training epoch."""
    epochs = [r.epoch for r in rows]
    fig, ax = plt.subplots(figsize=(8, 3))
    ax.plot(epochs, [r.total for r in rows], label="total", color="#2a7fba")
    ax.plot(epochs, [r.margin_term for r in rows], label="margin", color="#cc5500")
    ax.plot(epochs, [r.sparsity_term for r in rows], label="sparsity", color="#3a9d5d")
    ax.set_xlabel("epoch")
    ax.set_ylabel("loss")
    ax.set_title("training trace")
    ax.legend(loc="upper right")
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)


def save_diversity_figure(adjacent_sims, path: str | os.PathLike) -> None:
    """Cosine similarity between each pair of adjacent scenes."""
    sims = list(adjacent_sims)
    fig, ax = plt.subplots(figsize=(6, 3))
    if sims:
        ax.stem(np.arange(1, len(sims) + 1), sims)
    ax.set_xlabel("scene transition")
    ax.set_ylabel("cosine similarity")
    ax.set_ylim(-1.05, 1.05)
    ax.set_title("adjacent scene similarity")
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
