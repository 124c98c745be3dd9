"""Converse constructions: geometric chain metrics for single maps and for
families with a common fixed point, and the unbounded extension of a
certified core X1 to the whole space."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .chainmetric import MetricMatrix, dmu_exact, geometric
from .checks import Report, first
from .comparison import ComparisonFunction, psi_compose
from .errors import ConditionError, GateError, PreconditionError, VerificationError
from .instance import FiniteInstance
from .monoid import attractor_info, build_automaton, check_condition_a, require_attractor
from .remetrize import RemetrizationCertificate, remetrize
from .words import format_periodic


def _check_alpha(alpha) -> Fraction:
    alpha = Fraction(alpha)
    if not 0 < alpha < 1:
        raise PreconditionError("alpha must lie in (0, 1)")
    return alpha


def _contraction_failure(inst: FiniteInstance, d: MetricMatrix, alpha):
    return first(
        (i, x, y) for i, t in enumerate(inst.maps, start=1)
        for x, y in itertools.combinations(range(inst.points), 2)
        if d[t[x]][t[y]] > alpha * d[x][y]
    )


def _verified(inst, d, alpha):
    bad = _contraction_failure(inst, d, alpha)
    if bad is not None:
        raise VerificationError(f"map {bad[0]} is not an {alpha}-contraction at {bad[1:]}", bad)
    bad = first(d.axiom_failures())
    if bad is not None:
        raise VerificationError(f"not a metric: {bad}", bad)
    if d.max() > 1:
        raise VerificationError("distances exceed 1")
    return d


def bessaga_metric(inst: FiniteInstance, alpha) -> MetricMatrix:
    """Metric bounded by 1 in which the single map contracts by ``alpha``."""
    alpha = _check_alpha(alpha)
    if inst.k != 1:
        raise PreconditionError(f"expected a single map, got {inst.k}")
    aut = build_automaton(inst)
    cond = check_condition_a(aut)
    if not cond.ok:
        raise ConditionError(
            f"iterated images never shrink to a point along {format_periodic(cond.lasso)}"
        )
    return _verified(inst, dmu_exact(aut, geometric(alpha)), alpha)


def iterate_fixed_points(inst: FiniteInstance) -> list:
    """For the single map f: (k, fixed points of f^k) for k = 1..N."""
    (f,) = inst.maps
    out = []
    g = list(range(inst.points))
    for k in range(1, inst.points + 1):
        g = [f[v] for v in g]
        out.append((k, [x for x in range(inst.points) if g[x] == x]))
    return out


def common_fixed_points(inst: FiniteInstance) -> list:
    return [x for x in range(inst.points) if all(t[x] == x for t in inst.maps)]


def wong_metric(inst: FiniteInstance, alpha) -> MetricMatrix:
    """Metric in which every map contracts by ``alpha``, given a common fixed point."""
    alpha = _check_alpha(alpha)
    aut = build_automaton(inst)
    require_attractor(aut)
    fixed = common_fixed_points(inst)
    if not fixed:
        raise ConditionError("the maps share no fixed point")
    A = attractor_info(aut).attractor
    if A != {fixed[0]}:
        raise VerificationError(f"attractor {sorted(A)} is not the common fixed point {fixed[0]}")
    return _verified(inst, dmu_exact(aut, geometric(alpha)), alpha)


# -- unbounded extension -----------------------------------------------------

@dataclass(frozen=True)
class LevelFunction:
    """Steps for a point's orbit set to enter X1; None marks points already inside."""

    levels: tuple

    def __getitem__(self, x) -> Optional[int]:
        return self.levels[x]

    def inside(self, x) -> bool:
        return self.levels[x] is None

    def weight(self, x, M, a) -> Fraction:
        """M a^-l(x), taken to be 0 inside X1."""
        if self.inside(x):
            return Fraction(0)
        return Fraction(M) / Fraction(a) ** self.levels[x]

    def to_json(self):
        return ["inside" if v is None else v for v in self.levels]


def level_function(inst: FiniteInstance, x1) -> LevelFunction:
    core = frozenset(x1)
    if not core or not core <= set(range(inst.points)):
        raise PreconditionError("X1 must be a nonempty set of points")
    if not inst.hutchinson(core) <= core:
        raise ConditionError("condition (a): X1 is not mapped into itself")
    levels = []
    for x in range(inst.points):
        if x in core:
            levels.append(None)
            continue
        current, n = frozenset({x}), 0
        while not current <= core:
            current, n = inst.hutchinson(current), n + 1
            if n > inst.points:
                raise ConditionError(f"condition (d): orbit of {x} never enters X1")
        levels.append(n)
    return LevelFunction(tuple(levels))


@dataclass
class UnboundedResult:
    D: MetricMatrix
    psi: ComparisonFunction
    levels: LevelFunction
    core: list  # X1, sorted
    scale: Fraction  # the bound M used in the level weights
    certificate: RemetrizationCertificate
    checks: Report

    def to_json(self, with_float=False):
        doc = {
            "x1": self.core,
            "levels": self.levels.to_json(),
            "M": str(self.scale),
            "D": self.D.to_json(),
            "psi": self.psi.to_json(with_float),
            "phi": self.certificate.phi.to_json(with_float),
            "checks": {c.id: {"pass": c.passed, "counterexample": _plain(c.counterexample)}
                       for c in self.checks},
        }
        if with_float:
            doc["D_float"] = [[float(v) for v in row] for row in self.D.rows]
        return doc


def _plain(v):
    if v is None or isinstance(v, (bool, int, str)):
        return v
    if isinstance(v, (list, tuple)):
        return [_plain(u) for u in v]
    return str(v)


def unbounded_metric(inst: FiniteInstance, x1, a, M=1) -> UnboundedResult:
    """Extend the synthesized metric on X1 to all of X with level weights.

    D is the certified metric on X1 x X1 and max(M a^-l(x), M a^-l(y)) for
    other distinct pairs, where M is the diameter of X1 under that metric.
    """
    a = Fraction(a)
    if not 0 < a < 1:
        raise PreconditionError("a must lie in (0, 1)")
    levels = level_function(inst, x1)
    sub, old = inst.restrict(x1)
    sub_aut = build_automaton(sub)
    try:
        require_attractor(sub_aut)
    except GateError as exc:
        raise ConditionError(f"conditions (b)-(c): {exc}") from None
    cert = remetrize(sub_aut, M)
    if not cert.ok:
        raise VerificationError("pipeline on X1 failed its checks", cert.checks.failures()[0].id)
    position = {x: j for j, x in enumerate(old)}
    bound = cert.d.max() or cert.M
    n = inst.points
    rows = [[Fraction(0)] * n for _ in range(n)]
    for x, y in itertools.combinations(range(n), 2):
        if levels.inside(x) and levels.inside(y):
            v = cert.d[position[x]][position[y]]
        else:
            v = max(levels.weight(x, bound, a), levels.weight(y, bound, a))
        rows[x][y] = rows[y][x] = v
    D = MetricMatrix(rows)
    psi = psi_compose(cert.phi, a)
    rep = Report()
    rep.add("D-metric", first(D.axiom_failures()))
    rep.add("psi-comparison", first(psi.failures()))
    rep.add("psi-contraction", first(
        (i, x, y) for i, t in enumerate(inst.maps, start=1)
        for x, y in itertools.combinations(range(n), 2)
        if D[t[x]][t[y]] > psi(D[x][y])
    ))
    rep.add("level-decreases", first(
        (i, x) for i, t in enumerate(inst.maps, start=1) for x in range(n)
        if not levels.inside(x) and not levels.inside(t[x]) and levels[t[x]] > levels[x] - 1
    ))
    return UnboundedResult(D, psi, levels, old, bound, cert, rep)


def psi_dominance_failures(phi: ComparisonFunction, psi: ComparisonFunction, a, M, steps_per_unit=256):
    """Grid points (step M/256 up to 8M) where psi falls below phi or a*t, or reaches t."""
    a, M = Fraction(a), Fraction(M)
    step = M / steps_per_unit
    out = []
    for j in range(8 * steps_per_unit + 1):
        t = j * step
        v = psi(t)
        if v < phi(t) or v < a * t or (t > 0 and v >= t):
            out.append(t)
    return out
