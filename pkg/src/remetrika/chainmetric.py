"""Weight sequences and the chain semi-metric they induce.

For a nonincreasing positive sequence z, the distance between x != y is the
least total weight of a chain of cylinder sets S_0, ..., S_n with x in S_0,
y in S_n and consecutive sets overlapping, where a set costs z at its
deepest realizable word length.  Chains only depend on the sets, so the
infimum is a node-weighted shortest path over the distinct cylinder sets.
"""

from __future__ import annotations

import heapq
import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .checks import Report, first
from .errors import PreconditionError, ResourceError
from .monoid import (
    INF,
    MonoidAutomaton,
    attractor_info,
    layer_states,
    m_of_point,
    max_finite_depth,
    subset_profiles,
)
from .words import words_up_to


# -- sequences ---------------------------------------------------------------

@dataclass(frozen=True)
class WeightSequence:
    """z_0..z_P given explicitly; afterwards multiplied by ``ratio`` once per ``block_len`` indices."""

    prefix: tuple
    block_len: int = 1
    ratio: Fraction = Fraction(1)

    def __post_init__(self):
        pre = tuple(Fraction(v) for v in self.prefix)
        object.__setattr__(self, "prefix", pre)
        object.__setattr__(self, "ratio", Fraction(self.ratio))
        if not pre:
            raise ValueError("prefix must be nonempty")
        if any(v <= 0 for v in pre):
            raise ValueError("weights must be positive")
        if any(b > a for a, b in zip(pre, pre[1:])):
            raise ValueError("weights must be nonincreasing")
        if self.block_len < 1:
            raise ValueError("block_len must be at least 1")
        if not 0 < self.ratio <= 1:
            raise ValueError("ratio must lie in (0, 1]")

    def value_at(self, n) -> Fraction:
        if n == INF:
            return self.limit()
        last = len(self.prefix) - 1
        if n <= last:
            return self.prefix[n]
        blocks = (n - last - 1) // self.block_len + 1
        return self.prefix[-1] * self.ratio**blocks

    def limit(self) -> Fraction:
        return self.prefix[-1] if self.ratio == 1 else Fraction(0)

    def to_json(self):
        return {
            "prefix": [str(v) for v in self.prefix],
            "block_len": self.block_len,
            "ratio": str(self.ratio),
        }


@dataclass(frozen=True)
class SumSequence:
    """Weighted sum of sequences, evaluated term by term."""

    terms: tuple  # ((weight, sequence), ...)

    def value_at(self, n) -> Fraction:
        return sum((w * s.value_at(n) for w, s in self.terms), Fraction(0))

    def limit(self) -> Fraction:
        return sum((w * s.limit() for w, s in self.terms), Fraction(0))

    def horizon(self) -> int:
        """Index after which every term follows its tail rule."""
        return max(len(s.prefix) for _, s in self.terms)


def constant(m) -> WeightSequence:
    return WeightSequence((Fraction(m),))


def geometric(r, scale=1) -> WeightSequence:
    return WeightSequence((Fraction(scale),), 1, Fraction(r))


def weight_at(mu, n) -> Fraction:
    return mu.value_at(n)


def weight_limit(mu) -> Fraction:
    return mu.limit()


def frozen_at(mu, N: int) -> WeightSequence:
    """The sequence that follows ``mu`` up to index N and then stays at z_N."""
    return WeightSequence(tuple(mu.value_at(n) for n in range(N + 1)))


def frozen_halved(mu, N: int, p: int) -> WeightSequence:
    """Follows ``mu`` to N, stays at z_N for p more indices, then z_N / 2 forever."""
    zN = mu.value_at(N)
    return WeightSequence(tuple(mu.value_at(n) for n in range(N + 1)) + (zN,) * p + (zN / 2,))


def parse_mu(text: str) -> WeightSequence:
    kind, _, arg = text.partition(":")
    try:
        if kind == "constant":
            return constant(Fraction(arg))
        if kind == "geometric":
            return geometric(Fraction(arg))
        if kind == "file":
            with open(arg) as fh:
                doc = json.load(fh)
            return WeightSequence(
                tuple(Fraction(str(v)) for v in doc["prefix"]),
                int(doc.get("block_len", 1)),
                Fraction(str(doc.get("ratio", 1))),
            )
    except (ValueError, ZeroDivisionError, KeyError, TypeError, OSError) as exc:
        raise PreconditionError(f"bad weight sequence {text!r}: {exc}") from None
    raise PreconditionError(f"unknown weight sequence kind {kind!r}")


# -- matrices ----------------------------------------------------------------

class MetricMatrix:
    """Square symmetric table of exact distances."""

    def __init__(self, rows):
        self.rows = [list(map(Fraction, r)) for r in rows]

    @property
    def size(self) -> int:
        return len(self.rows)

    def __getitem__(self, x):
        return self.rows[x]

    def __eq__(self, other):
        return isinstance(other, MetricMatrix) and self.rows == other.rows

    def __repr__(self):
        return f"MetricMatrix({[[str(v) for v in r] for r in self.rows]})"

    def pairs(self):
        n = self.size
        return ((x, y) for x in range(n) for y in range(n))

    def max(self) -> Fraction:
        return max((v for r in self.rows for v in r), default=Fraction(0))

    def values(self):
        return sorted({v for r in self.rows for v in r if v > 0})

    def le(self, other, factor=1) -> bool:
        return all(self[x][y] <= factor * other[x][y] for x, y in self.pairs())

    def scaled(self, factor) -> "MetricMatrix":
        return MetricMatrix([[factor * v for v in r] for r in self.rows])

    def axiom_failures(self, require_positive=True):
        """Yield descriptions of violated metric axioms."""
        n = self.size
        for x in range(n):
            if self[x][x] != 0:
                yield f"d({x},{x}) = {self[x][x]}"
        for x, y in itertools.combinations(range(n), 2):
            if self[x][y] != self[y][x]:
                yield f"asymmetric at ({x},{y})"
            if self[x][y] < 0 or (require_positive and self[x][y] == 0):
                yield f"d({x},{y}) = {self[x][y]}"
        for x, y, z in itertools.product(range(n), repeat=3):
            if self[x][y] > self[x][z] + self[z][y]:
                yield f"triangle fails at ({x},{y}) via {z}"

    def is_metric(self) -> bool:
        return first(self.axiom_failures()) is None

    def to_json(self, with_float=False):
        doc = [[str(v) for v in r] for r in self.rows]
        if with_float:
            return {"exact": doc, "float": [[float(v) for v in r] for r in self.rows]}
        return doc

    def to_csv(self, with_float=False) -> str:
        cell = (lambda v: f"{v}") if not with_float else (lambda v: f"{v}")
        lines = [",".join(cell(v) for v in r) for r in self.rows]
        return "\n".join(lines) + "\n"


# -- shortest chains ---------------------------------------------------------

def chain_distances(points: int, nodes: Sequence, adjacency=None) -> MetricMatrix:
    """All-pairs least chain weight over ``nodes`` = [(set, weight), ...].

    Multi-source Dijkstra per starting point: a node's weight is charged on
    entry, and the sources are charged their own weight.  Nodes are adjacent
    when their sets share a point unless ``adjacency`` lists neighbours.
    """
    sets = [frozenset(s) for s, _ in nodes]
    weights = [Fraction(w) for _, w in nodes]
    if adjacency is None:
        adj = [[j for j in range(len(sets)) if j != i and sets[i] & sets[j]] for i in range(len(sets))]
    else:
        adj = adjacency
    containing = [[i for i, s in enumerate(sets) if x in s] for x in range(points)]
    rows = []
    for x in range(points):
        dist = {}
        heap = [(weights[i], i) for i in containing[x]]
        heapq.heapify(heap)
        while heap:
            d, i = heapq.heappop(heap)
            if i in dist:
                continue
            dist[i] = d
            for j in adj[i]:
                if j not in dist:
                    heapq.heappush(heap, (d + weights[j], j))
        row = []
        for y in range(points):
            if y == x:
                row.append(Fraction(0))
                continue
            reach = [dist[i] for i in containing[y] if i in dist]
            if not reach:
                raise PreconditionError(f"no chain joins {x} and {y}")
            row.append(min(reach))
        rows.append(row)
    return MetricMatrix(rows)


def chain_nodes(aut: MonoidAutomaton, mu, keep_infinite=False) -> list:
    nodes = []
    attractor = None
    for prof in subset_profiles(aut):
        if prof.depth == INF:
            if attractor is None:
                attractor = attractor_info(aut).attractor
            # any neighbour of {a} already contains a, so these never shorten a chain
            assert len(prof.subset) == 1 and prof.subset <= attractor, prof
            if not keep_infinite:
                continue
        nodes.append((prof.subset, mu.value_at(prof.depth)))
    return nodes


def dmu_exact(aut: MonoidAutomaton, mu, keep_infinite=False) -> MetricMatrix:
    return chain_distances(aut.points, chain_nodes(aut, mu, keep_infinite))


def dmu_truncated(aut: MonoidAutomaton, mu, N: int) -> MetricMatrix:
    """Chains restricted to words of length at most N."""
    deepest = {}
    for n, layer in enumerate(layer_states(aut, N)):
        for s in layer:
            deepest[aut.images[s]] = n
    nodes = [(s, mu.value_at(n)) for s, n in deepest.items()]
    return chain_distances(aut.points, nodes)


def _oracle_nodes(aut: MonoidAutomaton, mu, max_word_len: int, budget: int):
    deepest = {}
    count = 0
    for w in words_up_to(aut.k, max_word_len):
        count += 1
        if count > budget:
            raise ResourceError("word enumeration exceeds the oracle budget")
        img = aut.instance.image(w)
        deepest[img] = max(deepest.get(img, 0), len(w))
    return [(s, mu.value_at(n)) for s, n in deepest.items()]


def brute_chain_oracle(aut, mu, max_word_len, max_chain_len, x, y, budget=10**6) -> Fraction:
    """Exhaustive minimum over simple chains of enumerated word images."""
    if x == y:
        return Fraction(0)
    nodes = _oracle_nodes(aut, mu, max_word_len, budget)
    return _exhaustive_chain(nodes, max_chain_len, x, y, budget)


def brute_chain_matrix(aut, mu, max_word_len, max_chain_len=None, budget=10**6) -> MetricMatrix:
    nodes = _oracle_nodes(aut, mu, max_word_len, budget)
    if max_chain_len is None:
        max_chain_len = len(nodes)
    n = aut.points
    rows = [[Fraction(0)] * n for _ in range(n)]
    for x, y in itertools.combinations(range(n), 2):
        rows[x][y] = rows[y][x] = _exhaustive_chain(nodes, max_chain_len, x, y, budget)
    return MetricMatrix(rows)


def _exhaustive_chain(nodes, max_chain_len, x, y, budget):
    sets = [s for s, _ in nodes]
    weights = [w for _, w in nodes]
    best = [None]
    steps = [0]

    def extend(chain, cost):
        steps[0] += 1
        if steps[0] > budget:
            raise ResourceError("chain enumeration exceeds the oracle budget")
        if best[0] is not None and cost >= best[0]:
            return  # weights are positive, so longer chains only cost more
        last = chain[-1]
        if y in sets[last]:
            best[0] = cost
            return
        if len(chain) == max_chain_len:
            return
        for j in range(len(sets)):
            if j not in chain and sets[last] & sets[j]:
                extend(chain + [j], cost + weights[j])

    for i, s in enumerate(sets):
        if x in s:
            extend([i], weights[i])
    if best[0] is None:
        raise PreconditionError(f"no chain of length <= {max_chain_len} joins {x} and {y}")
    return best[0]


# -- property suites ---------------------------------------------------------

def prop38_suite(aut: MonoidAutomaton, mu) -> Report:
    d = dmu_exact(aut, mu)
    A = attractor_info(aut).attractor
    n = aut.points
    inst = aut.instance
    rep = Report()
    rep.add("zero-diagonal", first(x for x in range(n) if d[x][x] != 0))
    rep.add("symmetric", first((x, y) for x, y in d.pairs() if d[x][y] != d[y][x]))
    rep.add("triangle", first(
        (x, y, z) for x, y, z in itertools.product(range(n), repeat=3) if d[x][y] > d[x][z] + d[z][y]
    ))
    lower = {x: mu.value_at(m_of_point(aut, x)) for x in range(n) if x not in A}
    rep.add("off-attractor-lower-bound", first(
        (x, y) for x in lower for y in range(n) if y != x and not (d[x][y] >= lower[x] > 0)
    ))
    rep.add("nonexpansive", first(
        (i, x, y) for i, t in enumerate(inst.maps, start=1) for x, y in d.pairs()
        if d[t[x]][t[y]] > d[x][y]
    ))
    z0 = mu.value_at(0)
    rep.add("bounded-by-z0", first((x, y) for x, y in d.pairs() if d[x][y] > z0))
    if mu.value_at(0) == mu.limit():
        rep.add("metric-for-constant-weights", first(d.axiom_failures()))
    return rep


def discreteness_check(aut: MonoidAutomaton, mu) -> Report:
    """Points off the attractor are isolated: min_{y != x} d(x, y) >= z_{m(x)}."""
    d = dmu_exact(aut, mu)
    A = attractor_info(aut).attractor
    rep = Report()
    rep.add("discrete-off-A", first(
        x for x in range(aut.points) if x not in A and aut.points > 1
        and min(d[x][y] for y in range(aut.points) if y != x) < mu.value_at(m_of_point(aut, x))
    ))
    return rep


def prop310_311_suite(aut: MonoidAutomaton, mu, n_max: int, p_max: int = None) -> Report:
    exact = dmu_exact(aut, mu)
    m_star = max_finite_depth(aut)
    rep = Report()
    trunc = [dmu_truncated(aut, mu, N) for N in range(max(n_max, m_star) + 2)]
    rep.add("truncation-monotone", first(
        N for N in range(len(trunc) - 1) if not (exact.le(trunc[N + 1]) and trunc[N + 1].le(trunc[N]))
    ))
    rep.add("truncation-attained", first(N for N in range(m_star, len(trunc)) if trunc[N] != exact))
    rep.add("truncation-frozen-identity", first(N for N in range(n_max + 1) if trunc[N] != dmu_exact(aut, frozen_at(mu, N))))
    bad = None
    for N in range(n_max + 1):
        target = dmu_exact(aut, frozen_at(mu, N))
        attained = max(0, m_star - N)
        top = attained + 2 if p_max is None else max(p_max, attained + 1)
        mats = [dmu_exact(aut, frozen_halved(mu, N, p)) for p in range(top + 1)]
        if any(not a.le(b) for a, b in zip(mats, mats[1:])) or not mats[-1].le(target):
            bad = f"N={N} not monotone in p"
            break
        if any(mats[p] != target for p in range(attained, top + 1)):
            bad = f"N={N} limit not attained at p={attained}"
            break
    rep.add("halving-limit-attained", bad)
    return rep
