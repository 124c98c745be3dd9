"""PNG figures for the report subcommands (matplotlib, Agg backend)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _curve(fn, t_max, samples=801):
    ts = [t_max * j / (samples - 1) for j in range(samples)]
    return ts, [float(fn(t)) for t in ts]


def comparison_figure(path, fn, t_max, label="phi", extra=()):
    """Plot a comparison function against the diagonal; ``extra`` adds (label, fn) curves."""
    fig, ax = plt.subplots(figsize=(5, 4))
    ts, ys = _curve(fn, t_max)
    ax.plot(ts, ts, color="0.7", lw=0.8, ls="--", label="t")
    ax.step(ts, ys, where="post", lw=1.2, label=label)
    for name, other in extra:
        ax.plot(*_curve(other, t_max), lw=0.9, label=name)
    for t in fn.breakpoints:
        if 0 < t <= t_max:
            ax.axvline(float(t), color="0.9", lw=0.5, zorder=0)
    ax.set_xlabel("t")
    ax.legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    fig.savefig(Path(path), dpi=120)
    plt.close(fig)


def matrix_figure(path, matrix, title=""):
    fig, ax = plt.subplots(figsize=(4.5, 4))
    data = [[float(v) for v in row] for row in matrix.rows]
    im = ax.imshow(data, cmap="viridis")
    n = matrix.size
    if n <= 12:
        for x in range(n):
            for y in range(n):
                ax.text(y, x, str(matrix[x][y]), ha="center", va="center", fontsize=7, color="white")
    ax.set_xticks(range(n))
    ax.set_yticks(range(n))
    ax.set_title(title)
    fig.colorbar(im, ax=ax)
    fig.tight_layout()
    fig.savefig(Path(path), dpi=120)
    plt.close(fig)
