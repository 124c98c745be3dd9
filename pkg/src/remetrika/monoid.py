"""Transformation-monoid automaton of a finite family and the attractor decision.

States are the distinct composed maps f_w, reached from the identity by
appending letters on the right (g -> g o f_i).  The image of the state
reached by a word w is the cylinder X_w, and images can only shrink along
edges because X_{w i} = f_w(X_i) is a subset of f_w(X) = X_w.
"""

from __future__ import annotations

import math
import os
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import networkx as nx

from .errors import GateError, PreconditionError, ResourceError
from .instance import FiniteInstance
from .words import PeriodicWord, format_periodic

INF = math.inf
DEFAULT_STATE_CAP = 10**6


def state_cap() -> int:
    return int(os.environ.get("REMETRIKA_STATE_CAP", DEFAULT_STATE_CAP))


@dataclass(frozen=True)
class MapElement:
    table: tuple
    min_len: int
    max_len: float  # int, or INF

    @property
    def image(self) -> frozenset:
        return frozenset(self.table)


@dataclass
class MonoidAutomaton:
    instance: FiniteInstance
    states: list  # list[MapElement]; states[0] is the identity
    edges: list  # edges[s][i - 1] = index of s o f_i
    index: dict = field(repr=False)  # table -> state index
    images: list = field(repr=False)

    @property
    def k(self) -> int:
        return self.instance.k

    @property
    def points(self) -> int:
        return self.instance.points

    def step(self, s: int, letter: int) -> int:
        return self.edges[s][letter - 1]

    def state_of(self, word) -> int:
        s = 0
        for i in word:
            s = self.edges[s][i - 1]
        return s

    def graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(range(len(self.states)))
        for s, row in enumerate(self.edges):
            for i, t in enumerate(row, start=1):
                if not g.has_edge(s, t):
                    g.add_edge(s, t, letter=i)
        return g


def build_automaton(inst: FiniteInstance, cap: Optional[int] = None) -> MonoidAutomaton:
    cap = state_cap() if cap is None else cap
    identity = tuple(range(inst.points))
    tables = [identity]
    index = {identity: 0}
    min_len = [0]
    edges = []
    queue = deque([0])
    while queue:
        s = queue.popleft()
        g = tables[s]
        row = []
        for f in inst.maps:
            h = tuple(g[x] for x in f)
            t = index.get(h)
            if t is None:
                if len(tables) >= cap:
                    raise ResourceError(f"monoid exceeds the state budget of {cap} states")
                t = len(tables)
                index[h] = t
                tables.append(h)
                min_len.append(min_len[s] + 1)
                queue.append(t)
            row.append(t)
        # rows are filled in BFS order, which is also index order
        edges.append(row)

    max_len = _max_lengths(len(tables), edges)
    states = [MapElement(tables[s], min_len[s], max_len[s]) for s in range(len(tables))]
    images = [frozenset(t) for t in tables]
    return MonoidAutomaton(inst, states, edges, index, images)


def _max_lengths(n: int, edges: list) -> list:
    g = nx.DiGraph()
    g.add_nodes_from(range(n))
    g.add_edges_from((s, t) for s, row in enumerate(edges) for t in row)
    cyclic = set()
    for comp in nx.strongly_connected_components(g):
        if len(comp) > 1:
            cyclic |= comp
        else:
            (v,) = comp
            if g.has_edge(v, v):
                cyclic.add(v)
    unbounded = set(cyclic)
    for v in cyclic:
        unbounded |= nx.descendants(g, v)
    lengths = [INF] * n
    dag = g.subgraph(v for v in range(n) if v not in unbounded)
    for v in nx.topological_sort(dag):
        preds = list(dag.predecessors(v))
        lengths[v] = 0 if v == 0 else max(lengths[u] + 1 for u in preds)
    return lengths


# -- condition a) ------------------------------------------------------------

@dataclass(frozen=True)
class ConditionA:
    ok: bool
    lasso: Optional[PeriodicWord] = None

    def to_json(self):
        return True if self.ok else {"lasso": format_periodic(self.lasso)}


def _wide_graph(aut: MonoidAutomaton) -> nx.DiGraph:
    g = aut.graph()
    return g.subgraph(s for s in g if len(aut.images[s]) >= 2).copy()


def check_condition_a(aut: MonoidAutomaton) -> ConditionA:
    """Every infinite word's prefix images shrink to a single point.

    Fails exactly when the states with at least two image points carry a
    cycle; the witness is a lasso word that stays on that cycle forever.
    """
    wide = _wide_graph(aut)
    for comp in nx.strongly_connected_components(wide):
        h = next(iter(comp))
        if len(comp) == 1 and not wide.has_edge(h, h):
            continue
        loop = _cycle_word(wide, h)
        stem = _path_word(wide, 0, h)
        return ConditionA(False, PeriodicWord(stem, loop))
    return ConditionA(True)


def _path_word(g: nx.DiGraph, source: int, target: int) -> tuple:
    path = nx.shortest_path(g, source, target)
    return tuple(g.edges[u, v]["letter"] for u, v in zip(path, path[1:]))


def _cycle_word(g: nx.DiGraph, h: int) -> tuple:
    if g.has_edge(h, h):
        return (g.edges[h, h]["letter"],)
    best = None
    for t in g.successors(h):
        if nx.has_path(g, t, h):
            w = (g.edges[h, t]["letter"],) + _path_word(g, t, h)
            if best is None or len(w) < len(best):
                best = w
    return best


def singleton_depth(aut: MonoidAutomaton) -> int:
    """Least n such that every word of length n has a one-point image.

    Requires condition a); the states with larger images then form a DAG.
    """
    wide = _wide_graph(aut)
    if 0 not in wide:
        return 0
    longest = {}
    for v in nx.topological_sort(wide):
        preds = list(wide.predecessors(v))
        longest[v] = 0 if v == 0 else max(longest[u] + 1 for u in preds)
    return max(longest.values()) + 1


def require_attractor(aut: MonoidAutomaton) -> None:
    cond = check_condition_a(aut)
    if not cond.ok:
        raise GateError(
            f"family has no attractor: prefix images of {format_periodic(cond.lasso)} never shrink",
            witness=cond.lasso,
        )


# -- attractor ---------------------------------------------------------------

def evaluate_address(aut: MonoidAutomaton, alpha: PeriodicWord) -> int:
    """The point a_alpha, the unique element of the nested cylinders X_[alpha]_n."""
    s = aut.state_of(alpha.pre)
    seen = set()
    pos = 0
    while len(aut.images[s]) > 1:
        key = (s, pos)
        if key in seen:
            raise GateError(
                f"prefix images of {format_periodic(alpha)} cycle without shrinking", witness=alpha
            )
        seen.add(key)
        s = aut.step(s, alpha.period[pos])
        pos = (pos + 1) % len(alpha.period)
    (point,) = aut.images[s]
    return point


@dataclass
class AttractorInfo:
    attractor: frozenset
    n_table: dict  # point -> int or INF
    addresses: dict  # attractor point -> PeriodicWord
    layers: list  # F^[m](X) for m = 0 .. fixpoint

    def to_json(self):
        return {
            "attractor": sorted(self.attractor),
            "n": {str(x): ("inf" if v == INF else v) for x, v in sorted(self.n_table.items())},
            "addresses": {str(a): format_periodic(w) for a, w in sorted(self.addresses.items())},
        }


def attractor_info(aut: MonoidAutomaton) -> AttractorInfo:
    inst = aut.instance
    layers = [frozenset(range(inst.points))]
    while True:
        nxt = inst.hutchinson(layers[-1])
        if nxt == layers[-1]:
            break
        layers.append(nxt)
    attractor = layers[-1]
    n_table = {}
    for x in range(inst.points):
        if x in attractor:
            n_table[x] = INF
        else:
            n_table[x] = max(m for m, layer in enumerate(layers) if x in layer)
    addresses = {a: _backward_address(inst, attractor, a) for a in sorted(attractor)}
    return AttractorInfo(attractor, n_table, addresses, layers)


def _backward_address(inst: FiniteInstance, attractor, a: int) -> PeriodicWord:
    # a = f_{i1}(a1), a1 = f_{i2}(a2), ... inside A, until a point repeats
    chain = [a]
    letters = []
    position = {a: 0}
    while True:
        cur = chain[-1]
        i, prev = min(
            (i, y) for i, t in enumerate(inst.maps, start=1) for y in sorted(attractor) if t[y] == cur
        )
        letters.append(i)
        if prev in position:
            j = position[prev]
            return PeriodicWord(letters[:j], letters[j:])
        position[prev] = len(chain)
        chain.append(prev)


def has_attractor(aut: MonoidAutomaton, sample=None) -> dict:
    """Decide the two attractor conditions and return a certificate.

    Condition b) is derived from a) on finite sets: every cylinder chain
    reaches its one-point limit at finite depth, so distinct limits have
    disjoint cylinders there.  ``sample`` pairs of periodic words are
    spot-checked with :func:`separation_witness`.
    """
    cond = check_condition_a(aut)
    cert = {"has_attractor": cond.ok, "condition_a": cond.to_json()}
    if not cond.ok:
        cert["condition_b"] = "not-evaluated"
        return cert
    cert["condition_b"] = "derived-from-a"
    info = attractor_info(aut)
    cert.update(info.to_json())
    cert["singleton_depth"] = singleton_depth(aut)
    if sample:
        checked = 0
        for alpha, beta in sample:
            if evaluate_address(aut, alpha) != evaluate_address(aut, beta):
                separation_witness(aut, alpha, beta)
                checked += 1
        cert["separation_spot_checks"] = checked
    return cert


# -- cylinders ---------------------------------------------------------------

def image_of_word(aut: MonoidAutomaton, word) -> frozenset:
    return aut.images[aut.state_of(word)]


@dataclass(frozen=True)
class SubsetProfile:
    subset: frozenset
    depth: float  # sup of lengths of words with this image; INF allowed


def subset_profiles(aut: MonoidAutomaton) -> list:
    depth = {}
    for s, st in enumerate(aut.states):
        img = aut.images[s]
        depth[img] = max(depth.get(img, 0), st.max_len)
    return [SubsetProfile(img, d) for img, d in sorted(depth.items(), key=lambda kv: (-len(kv[0]), sorted(kv[0])))]


def m_of_point(aut: MonoidAutomaton, x: int) -> float:
    return max(p.depth for p in subset_profiles(aut) if x in p.subset)


def max_finite_depth(aut: MonoidAutomaton) -> int:
    """Largest finite depth among the cylinder sets (M* in the test suites)."""
    return max((p.depth for p in subset_profiles(aut) if p.depth != INF), default=0)


def layer_states(aut: MonoidAutomaton, depth: int) -> list:
    """layer[n] = set of states reached by words of length exactly n."""
    layers = [{0}]
    for _ in range(depth):
        layers.append({t for s in layers[-1] for t in aut.edges[s]})
    return layers


def separation_witness(aut: MonoidAutomaton, alpha: PeriodicWord, beta: PeriodicWord) -> int:
    """Least n0 with X_[alpha]_n0 and X_[beta]_n0 disjoint."""
    if evaluate_address(aut, alpha) == evaluate_address(aut, beta):
        raise PreconditionError("the two words have the same address")
    bound = singleton_depth(aut)
    sa = sb = 0
    ia, ib = alpha.letters(), beta.letters()
    for n in range(bound + 1):
        if not (aut.images[sa] & aut.images[sb]):
            return n
        sa = aut.step(sa, next(ia))
        sb = aut.step(sb, next(ib))
    raise AssertionError("cylinders of distinct addresses failed to separate")


def hausdorff(metric, a, b) -> object:
    """Two-sided sup-inf distance between finite nonempty point sets."""
    forward = max(min(metric[x][y] for y in b) for x in a)
    backward = max(min(metric[x][y] for x in a) for y in b)
    return max(forward, backward)


def hutchinson_sequence(aut: MonoidAutomaton, start, metric) -> list:
    start = frozenset(start)
    if not start:
        raise PreconditionError("starting set must be nonempty")
    attractor = attractor_info(aut).attractor
    out = [(start, hausdorff(metric, start, attractor))]
    seen = {start}
    current = start
    while True:
        nxt = aut.instance.hutchinson(current)
        if nxt == current:
            return out
        if nxt in seen:
            raise GateError("Hutchinson iteration cycles without reaching a fixpoint")
        seen.add(nxt)
        current = nxt
        out.append((current, hausdorff(metric, current, attractor)))
