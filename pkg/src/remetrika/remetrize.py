"""Synthesize a bounded metric under which every map is a comparison contraction.

Pipeline, all in exact rationals:

1. one staircase weight sequence per pair of attractor points, each keeping
   its pair at distance at least M/2 while its weights decay to 0;
2. rho, the 2^-n weighted sum of the chain metrics of those sequences;
3. eta, the same weighted sum taken on the sequences themselves, and the
   chain metric delta it induces;
4. the final metric d, the largest rescaled delta-distance over all composed
   maps, with the scale growing with word length;
5. a piecewise-linear comparison function phi with d(f x, f y) <= phi(d(x, y)).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .chainmetric import MetricMatrix, SumSequence, WeightSequence, dmu_exact
from .checks import Report, first
from .comparison import ComparisonFunction, pointwise_max, ramp
from .errors import PreconditionError
from .monoid import (
    INF,
    MonoidAutomaton,
    attractor_info,
    evaluate_address,
    max_finite_depth,
    require_attractor,
    singleton_depth,
)
from .words import format_periodic, periodic_words, prefix


@dataclass(frozen=True)
class ScaleSequence:
    """c_n = 2 - 2^-n, with limit 2."""

    def value(self, n) -> Fraction:
        if n == INF:
            return self.limit()
        return 2 - Fraction(1, 2**n)

    def limit(self) -> Fraction:
        return Fraction(2)

    def axiom_failures(self, n_max: int = 64) -> list:
        out = []
        if self.value(0) != 1:
            out.append("c_0 != 1")
        ratios = [self.value(n) / self.value(n + 1) for n in range(n_max + 1)]
        for n in range(n_max + 1):
            if not self.value(n) < self.value(n + 1) <= self.limit():
                out.append(f"c not increasing below the limit at {n}")
            if not Fraction(1, 2) <= ratios[n] < 1:
                out.append(f"ratio out of range at {n}")
        out += [f"ratio not increasing at {n}" for n in range(n_max) if not ratios[n] < ratios[n + 1]]
        return out


# -- separating sequences ----------------------------------------------------

def _staircase_value(M, breaks, n):
    """M at 0, then M / 2^q on (p_q, p_{q+1}] for breaks = [p_0, p_1, ...]."""
    if n == 0:
        return M
    q = sum(1 for p in breaks[1:] if p < n)
    return M / 2**q


def _frozen_staircase(M, breaks, last):
    # staircase through index ``last``, then constant at the next level
    values = [_staircase_value(M, breaks, n) for n in range(last + 1)]
    return WeightSequence(tuple(values) + (M / 2 ** (len(breaks) - 1),))


def staircase_breaks(aut: MonoidAutomaton, x: int, y: int, M) -> list:
    """Breakpoints p_0 = 0 < p_1 < ... chosen greedily.

    Round k takes the least p_{k+1} for which halving the weights past
    p_{k+1} lowers d(x, y) by less than M / 2^(k+2).  Once p_k reaches the
    deepest finite cylinder depth every later halving is free, so the search
    stops there (and after at least one round).
    """
    M = Fraction(M)
    m_star = max_finite_depth(aut)
    breaks = [0]
    current = dmu_exact(aut, WeightSequence((M,)))[x][y]
    while breaks[-1] < m_star or len(breaks) < 2:
        k = len(breaks) - 1
        p = breaks[-1] + 1
        while True:
            trial = dmu_exact(aut, _frozen_staircase(M, breaks + [p], p))[x][y]
            if current - trial < M / 2 ** (k + 2):
                break
            p += 1
        breaks.append(p)
        current = trial
    return breaks


def separating_sequence(aut: MonoidAutomaton, x: int, y: int, M=1) -> WeightSequence:
    if x == y:
        raise PreconditionError("separating sequence needs two distinct points")
    M = Fraction(M)
    breaks = staircase_breaks(aut, x, y, M)
    last = breaks[-1]
    values = tuple(_staircase_value(M, breaks, n) for n in range(last + 1))
    # every later block has length one, so the tail halves at each index
    return WeightSequence(values, 1, Fraction(1, 2))


def default_sequence(aut: MonoidAutomaton, M=1) -> WeightSequence:
    """Used when the attractor is one point: M up to the deepest finite depth, then halving."""
    M = Fraction(M)
    return WeightSequence((M,) * (max_finite_depth(aut) + 1), 1, Fraction(1, 2))


def rho_metric(aut: MonoidAutomaton, M=1):
    """Returns (rho, sequences, pairs)."""
    M = Fraction(M)
    A = sorted(attractor_info(aut).attractor)
    pairs = list(itertools.combinations(A, 2))
    if pairs:
        seqs = [separating_sequence(aut, x, y, M) for x, y in pairs]
    else:
        seqs = [default_sequence(aut, M)]
    mats = [dmu_exact(aut, mu) for mu in seqs]
    n = aut.points
    rho = MetricMatrix([
        [sum((Fraction(1, 2**j) * m[x][y] for j, m in enumerate(mats)), Fraction(0)) for y in range(n)]
        for x in range(n)
    ])
    return rho, seqs, pairs


def eta_sequence(sequences) -> SumSequence:
    if not sequences:
        raise PreconditionError("need at least one sequence")
    return SumSequence(tuple((Fraction(1, 2**j), mu) for j, mu in enumerate(sequences)))


def delta_metric(aut: MonoidAutomaton, eta) -> MetricMatrix:
    return dmu_exact(aut, eta)


def final_metric(aut: MonoidAutomaton, delta: MetricMatrix, scale: ScaleSequence = None) -> MetricMatrix:
    """d(x, y) = max over composed maps g of c_{deepest |w| with f_w = g} * delta(g x, g y)."""
    scale = scale or ScaleSequence()
    n = aut.points
    rows = [[Fraction(0)] * n for _ in range(n)]
    for st in aut.states:
        c = scale.value(st.max_len)
        g = st.table
        for x, y in itertools.combinations(range(n), 2):
            v = c * delta[g[x]][g[y]]
            if v > rows[x][y]:
                rows[x][y] = rows[y][x] = v
    return MetricMatrix(rows)


# -- comparison function -----------------------------------------------------

@dataclass(frozen=True)
class PhiPiece:
    r: Fraction
    depth: int  # least n with 2 eta_n <= r / 20
    slope: Fraction
    start: Fraction
    end: Fraction

    def to_json(self):
        return {k: str(getattr(self, k)) for k in ("r", "depth", "slope", "start", "end")}


def phi_pieces(d: MetricMatrix, eta, scale: ScaleSequence, M) -> list:
    M = Fraction(M)
    out = []
    for r in d.values():
        n = 0
        while 2 * eta.value_at(n) > r / 20:
            n += 1
        slope = scale.value(n) / scale.value(n + 1)
        if r < 4 * M:
            half_width = min(4 * M - r, r / 2) / 2
            out.append(PhiPiece(r, n, slope, r - half_width, r + half_width))
        else:
            out.append(PhiPiece(r, n, slope, 2 * M, 4 * M))
    return out


def build_phi(aut: MonoidAutomaton, d: MetricMatrix, eta, scale: ScaleSequence, M) -> ComparisonFunction:
    return _phi_from(_checked_pieces(d, eta, scale, M))


def _checked_pieces(d, eta, scale, M):
    if d.max() > 4 * Fraction(M):
        raise PreconditionError(f"metric exceeds 4M = {4 * Fraction(M)}")
    return phi_pieces(d, eta, scale, M)


def _phi_from(pieces) -> ComparisonFunction:
    if not pieces:
        return ComparisonFunction(((0, 0, 0),))
    return pointwise_max(ramp(p.start, p.end, p.slope) for p in pieces)


# -- certificate -------------------------------------------------------------

@dataclass
class RemetrizationCertificate:
    M: Fraction
    pairs: list
    sequences: list
    rho: MetricMatrix
    eta: SumSequence
    delta: MetricMatrix
    d: MetricMatrix
    phi: ComparisonFunction
    pieces: list
    scale: ScaleSequence = field(default_factory=ScaleSequence)
    checks: Report = field(default_factory=Report)

    @property
    def ok(self) -> bool:
        return bool(self.checks) and self.checks.ok

    def eta_values(self) -> list:
        return [self.eta.value_at(n) for n in range(self.eta.horizon() + 1)]

    def to_json(self, with_float=False):
        doc = {
            "M": str(self.M),
            "pairs": [list(p) for p in self.pairs],
            "mu": [mu.to_json() for mu in self.sequences],
            "rho": self.rho.to_json(),
            "eta": {
                "weights": [str(w) for w, _ in self.eta.terms],
                "values": [str(v) for v in self.eta_values()],
            },
            "delta": self.delta.to_json(),
            "d": self.d.to_json(),
            "phi": self.phi.to_json(),
            "phi_pieces": [p.to_json() for p in self.pieces],
            "scale": "2 - 2^-n",
            "checks": {c.id: {"pass": c.passed, "counterexample": _jsonable(c.counterexample)}
                       for c in self.checks},
            "notes": [
                "one separating sequence per pair of attractor points (finite cover)",
                "phi is the maximum of one ramp per realized distance",
                "completeness holds trivially on a finite space",
            ],
        }
        if with_float:
            for key in ("rho", "delta", "d"):
                doc[key + "_float"] = [[float(v) for v in row] for row in getattr(self, key).rows]
            doc["eta"]["values_float"] = [float(v) for v in self.eta_values()]
            doc["phi"] = self.phi.to_json(with_float=True)
        return doc


def _jsonable(value):
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, (tuple, list)):
        return [_jsonable(v) for v in value]
    return str(value)


def remetrize(aut: MonoidAutomaton, M=1, scale: Optional[ScaleSequence] = None) -> RemetrizationCertificate:
    """Run the whole pipeline and attach the verification report."""
    require_attractor(aut)
    M = Fraction(M)
    if M <= 0:
        raise PreconditionError("M must be positive")
    scale = scale or ScaleSequence()
    rho, seqs, pairs = rho_metric(aut, M)
    eta = eta_sequence(seqs)
    delta = delta_metric(aut, eta)
    d = final_metric(aut, delta, scale)
    pieces = phi_pieces(d, eta, scale, M) if d.max() <= 4 * M else []
    phi = _phi_from(pieces)
    cert = RemetrizationCertificate(M, pairs, seqs, rho, eta, delta, d, phi, pieces, scale)
    cert.checks = verify_certificate(aut, cert)
    return cert


def fixed_point_orbits(aut: MonoidAutomaton):
    """Per map: (fixed points, first start whose orbit misses them within N steps)."""
    inst = aut.instance
    out = []
    for t in inst.maps:
        fixed = [x for x in range(inst.points) if t[x] == x]
        stray = None
        for x in range(inst.points):
            y = x
            for _ in range(inst.points):
                y = t[y]
            if len(fixed) != 1 or y != fixed[0]:
                stray = x
                break
        out.append((fixed, stray))
    return out


def _diameter(d: MetricMatrix, subset) -> Fraction:
    return max((d[x][y] for x in subset for y in subset), default=Fraction(0))


def verify_certificate(aut: MonoidAutomaton, cert: RemetrizationCertificate) -> Report:
    inst = aut.instance
    n = aut.points
    M, d, delta, rho, phi = cert.M, cert.d, cert.delta, cert.rho, cert.phi
    rep = Report()
    rep.add("scale-axioms", first(cert.scale.axiom_failures()))
    info = attractor_info(aut)
    bad_seq = None
    for (x, y), mu in zip(cert.pairs, cert.sequences):
        if mu.limit() != 0 or mu.value_at(0) != M:
            bad_seq = [x, y]
        elif not dmu_exact(aut, mu)[x][y] >= M / 2:
            bad_seq = [x, y]
        if bad_seq:
            break
    rep.add("separating-sequences", bad_seq)
    rep.add("rho-metric", first(rho.axiom_failures()))
    rep.add("rho<=2M", first((x, y) for x, y in rho.pairs() if rho[x][y] > 2 * M))
    rep.add("rho<=delta", first((x, y) for x, y in rho.pairs() if rho[x][y] > delta[x][y]))
    rep.add("delta<=2M", first((x, y) for x, y in delta.pairs() if delta[x][y] > 2 * M))
    rep.add("delta-metric", first(delta.axiom_failures()))
    rep.add("d-metric", first(d.axiom_failures()))
    rep.add("d<=4M", first((x, y) for x, y in d.pairs() if d[x][y] > 4 * M))
    rep.add("delta<=d<=2delta", first(
        (x, y) for x, y in d.pairs() if not delta[x][y] <= d[x][y] <= 2 * delta[x][y]
    ))
    # diam_d of a cylinder is bounded by 2 eta at every length of a word that
    # produces it, so checking the deepest length per composed map covers all words
    eta = cert.eta
    rep.add("cylinder-diameter", first(
        st.table for st in aut.states if st.max_len != INF
        and _diameter(d, set(st.table)) > 2 * eta.value_at(st.max_len)
    ))
    rep.add("phi-comparison", first(phi.failures()))
    rep.add("phi-covers-distances", first(
        v for v in d.values() if not any(p.start <= v <= p.end for p in cert.pieces)
    ))
    rep.add("contraction", first(
        (i, x, y) for i, t in enumerate(inst.maps, start=1)
        for x, y in itertools.combinations(range(n), 2)
        if d[t[x]][t[y]] > phi(d[x][y])
    ))
    try:
        phi.orbit_to_zero(4 * M)
        vanish = None
    except AssertionError as exc:
        vanish = str(exc)
    rep.add("phi-iterates-vanish", vanish)
    rep.add("unique-fixed-point", first(
        (i, fixed, stray) for i, (fixed, stray) in enumerate(fixed_point_orbits(aut), start=1)
        if stray is not None
    ))
    # the diameter of X_[alpha]_n shrinks at least as fast as phi iterates
    diam_x = _diameter(d, range(n))
    depth = singleton_depth(aut)
    bound = [diam_x]
    for _ in range(depth + 2):
        bound.append(phi(bound[-1]))
    rep.add("diameter-iterates", first(
        f"{format_periodic(a)} n={k}" for a in periodic_words(aut.k, 1, 2) for k in range(depth + 2)
        if _diameter(d, inst.image(prefix(a, k))) > bound[k]
    ))
    rep.add("attractor-in-cylinders", first(
        a for a, w in info.addresses.items() if evaluate_address(aut, w) != a
    ))
    rep.add("complete", None)
    return rep
