"""Figures written next to the CSV outputs (Agg backend, no display needed)."""

from __future__ import annotations

import math
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_RC = {
    "figure.figsize": (6.0, 3.6),
    "font.size": 9,
    "axes.linewidth": 0.6,
    "lines.linewidth": 0.9,
    "savefig.dpi": 150,
}


def plot_trajectory(path, times: Sequence[complex], states: Sequence[Sequence[complex]], oracle=None, title=None,
                    labels=("x1", "x2")):
    """|x1|, |x2| against real time (path-parameter index for complex time)."""
    t = np.asarray([complex(v) for v in times])
    tx = t.real if np.all(t.imag == 0) else np.arange(len(t))
    xs = np.asarray([[complex(a), complex(b)] for a, b in states])
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.semilogy(tx, np.abs(xs[:, 0]), label=f"|{labels[0]}|")
        ax.semilogy(tx, np.abs(xs[:, 1]), label=f"|{labels[1]}|")
        if oracle is not None:
            ox = np.asarray([[complex(a), complex(b)] for a, b in oracle])
            ax.semilogy(tx, np.abs(ox[:, 0]), "k:", label=f"oracle |{labels[0]}|")
            ax.semilogy(tx, np.abs(ox[:, 1]), "k--", lw=0.6, label=f"oracle |{labels[1]}|")
        ax.set_xlabel("t" if tx is t.real else "sample")
        ax.legend(frameon=False, fontsize=7)
        if title:
            ax.set_title(title)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)


def plot_trace(path, times, values, peaks=(), median=None, title="ln|x1|^2"):
    """Long-time ``ln|x1|^2`` trace with detected peaks marked."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(7.5, 3.2))
        ax.plot(times, values, lw=0.5)
        if median is not None:
            ax.axhline(median, color="0.5", lw=0.5, ls="--")
            ax.axhline(median + math.log(3), color="0.5", lw=0.5, ls=":")
        if peaks:
            pt, pv = zip(*peaks)
            ax.plot(pt, pv, "rv", ms=3)
        ax.set_xlabel("t")
        ax.set_ylabel(title)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)


def plot_period_histogram(path, counts: dict, title="measured periods"):
    """Bar chart of period multiples (``None`` shown as 'fail')."""
    labels = [str(k) if k is not None else "fail" for k in counts]
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4.0, 3.0))
        ax.bar(range(len(labels)), list(counts.values()), color="0.4")
        ax.set_xticks(range(len(labels)), labels)
        ax.set_xlabel("period / T")
        ax.set_ylabel("count")
        ax.set_title(title)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
