"""Planar affine families: cylinder polygons, chaos-game samples and an
approximate chain metric over sampled points.

Nothing here is exact in the sense of the finite pipeline.  The chain metric
uses words up to a fixed depth and only the sampled points, so it is an
upper bound on the true value at those points.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
from shapely.geometry import Point, Polygon

from .chainmetric import MetricMatrix, chain_distances
from .instance import AffineInstance, AffineMap
from .words import words_up_to

IDENTITY = AffineMap(*(Fraction(v) for v in (1, 0, 0, 1, 0, 0)))


def word_map(inst: AffineInstance, word) -> AffineMap:
    """f_w = f_{w_1} o ... o f_{w_n}."""
    g = IDENTITY
    for i in word:
        g = g.compose(inst.maps[i - 1])
    return g


def cylinder_polygon(inst: AffineInstance, word) -> list:
    """Exact corners of f_w(bbox); affine maps send the box to a parallelogram."""
    g = word_map(inst, word)
    return [g(c) for c in inst.corners()]


def cylinders(inst: AffineInstance, depth: int) -> list:
    return [(w, cylinder_polygon(inst, w)) for w in itertools.product(range(1, inst.k + 1), repeat=depth)]


def chaos_indices(seed: int, count: int, k: int) -> np.ndarray:
    """Map choices for the chaos game: raw 64-bit PCG64 outputs reduced mod k."""
    raw = np.random.PCG64(seed).random_raw(count)
    return (raw % np.uint64(k)).astype(np.int64)


def chaos_game(inst: AffineInstance, seed: int, samples: int, burn_in: int = 16) -> np.ndarray:
    """Float points of the orbit of the bbox centre under randomly chosen maps."""
    mats = [(float(m.a), float(m.b), float(m.c), float(m.d), float(m.e), float(m.f)) for m in inst.maps]
    x0, y0, x1, y1 = (float(v) for v in inst.bbox)
    x, y = (x0 + x1) / 2, (y0 + y1) / 2
    out = np.empty((samples, 2))
    for j, i in enumerate(chaos_indices(seed, samples + burn_in, inst.k)):
        a, b, c, d, e, f = mats[i]
        x, y = a * x + b * y + e, c * x + d * y + f
        if j >= burn_in:
            out[j - burn_in] = (x, y)
    return out


def approximate_dmu(inst: AffineInstance, mu, depth: int, points) -> MetricMatrix:
    """Truncated chain metric on the given sample points.

    Nodes are the cylinder polygons of words up to ``depth``, weighted by the
    sequence at the word length, adjacent when the polygons intersect.
    Membership of a sample point uses closed polygons.
    """
    polys, weights = [], []
    for w in words_up_to(inst.k, depth):
        corners = [(float(u), float(v)) for u, v in cylinder_polygon(inst, w)]
        polys.append(Polygon(corners))
        weights.append(mu.value_at(len(w)))
    pts = [Point(float(p[0]), float(p[1])) for p in points]
    members = [frozenset(j for j, p in enumerate(pts) if poly.intersects(p)) for poly in polys]
    adjacency = [
        [j for j in range(len(polys)) if j != i and polys[i].intersects(polys[j])]
        for i in range(len(polys))
    ]
    return chain_distances(len(pts), list(zip(members, weights)), adjacency)
