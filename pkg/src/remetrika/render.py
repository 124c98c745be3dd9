"""Deterministic SVG for affine families: a chaos-game cloud snapped to a pixel
grid, plus optional cylinder outlines.  The text is produced by hand so the
same seed always gives the same bytes."""

from __future__ import annotations

import numpy as np

from .affine import chaos_game, cylinders
from .instance import AffineInstance

SIZE = 512


def _to_canvas(inst: AffineInstance):
    x0, y0, x1, y1 = (float(v) for v in inst.bbox)
    sx, sy = SIZE / (x1 - x0), SIZE / (y1 - y0)

    def place(x, y):
        # SVG y grows downwards
        return (x - x0) * sx, SIZE - (y - y0) * sy

    return place


def render_svg(inst: AffineInstance, seed: int = 0, samples: int = 100_000, cylinder_depth: int = None) -> str:
    place = _to_canvas(inst)
    pts = chaos_game(inst, seed, samples)
    cx, cy = place(pts[:, 0], pts[:, 1])
    px = np.clip(np.floor(cx).astype(np.int64), 0, SIZE - 1)
    py = np.clip(np.floor(cy).astype(np.int64), 0, SIZE - 1)
    pixels = sorted(set(zip(px.tolist(), py.tolist())))
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
        f'<rect width="{SIZE}" height="{SIZE}" fill="white"/>',
    ]
    if cylinder_depth is not None:
        lines.append('<g fill="none" stroke="#c0392b" stroke-width="0.5">')
        for word, corners in cylinders(inst, cylinder_depth):
            coords = " ".join("%.4f,%.4f" % place(float(u), float(v)) for u, v in corners)
            label = ".".join(map(str, word)) or "empty"
            lines.append(f'<polygon data-word="{label}" points="{coords}"/>')
        lines.append("</g>")
    path = "".join(f"M{x} {y}h1v1h-1z" for x, y in pixels)
    lines.append(f'<path fill="black" d="{path}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def polygon_count(svg: str) -> int:
    return svg.count("<polygon ")

