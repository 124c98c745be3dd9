"""Exact piecewise-linear comparison functions.

A function is stored as sorted pieces ``(t_j, v_j, s_j)``: on [t_j, t_{j+1})
its value is v_j + s_j (t - t_j), and the last piece runs to infinity.
Jumps happen at piece starts, so the function is right-continuous.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import PreconditionError


@dataclass(frozen=True)
class ComparisonFunction:
    pieces: tuple  # ((t, value_at_t, slope), ...), t strictly increasing from 0

    def __post_init__(self):
        pieces = tuple((Fraction(t), Fraction(v), Fraction(s)) for t, v, s in self.pieces)
        if not pieces or pieces[0][0] != 0:
            raise ValueError("first piece must start at 0")
        if any(b[0] <= a[0] for a, b in zip(pieces, pieces[1:])):
            raise ValueError("piece starts must increase strictly")
        object.__setattr__(self, "pieces", _merge(pieces))

    # -- evaluation --------------------------------------------------------

    def _piece(self, t):
        return self.pieces[bisect_right([p[0] for p in self.pieces], t) - 1]

    def __call__(self, t) -> Fraction:
        t = Fraction(t)
        if t < 0:
            raise ValueError("comparison functions live on [0, inf)")
        t0, v, s = self._piece(t)
        return v + s * (t - t0)

    def left_limit(self, t) -> Fraction:
        t = Fraction(t)
        if t <= 0:
            return self(0)
        j = bisect_right([p[0] for p in self.pieces], t) - 1
        t0, v, s = self.pieces[j]
        if t0 == t:
            t0, v, s = self.pieces[j - 1]
        return v + s * (t - t0)

    @property
    def breakpoints(self) -> list:
        return [p[0] for p in self.pieces]

    @property
    def final_slope(self) -> Fraction:
        return self.pieces[-1][2]

    # -- invariants --------------------------------------------------------

    def failures(self) -> list:
        """Violated comparison-function invariants, as short strings."""
        out = []
        ps = self.pieces
        if ps[0][1] != 0:
            out.append(f"value {ps[0][1]} at 0")
        for t, v, s in ps:
            if s < 0:
                out.append(f"negative slope {s} at {t}")
            if t > 0 and v >= t:
                out.append(f"value {v} >= {t} at {t}")
        for j in range(1, len(ps)):
            t = ps[j][0]
            left = self.left_limit(t)
            if ps[j][1] < left:
                out.append(f"downward jump at {t}")
            # value - t is linear on the piece; its start was checked above
            if left > t or (left == t and ps[j - 1][0] == 0 and ps[j - 1][1] == 0):
                out.append(f"left limit {left} reaches {t}")
        if self.final_slope >= 1:
            out.append(f"final slope {self.final_slope} >= 1")
        return out

    def is_comparison(self) -> bool:
        return not self.failures()

    def iterate(self, t, n: int) -> Fraction:
        t = Fraction(t)
        for _ in range(n):
            t = self(t)
        return t

    def orbit_to_zero(self, t, max_steps: int = 10**6) -> list:
        """Iterates from ``t`` until they hit 0; raises if they stall or increase.

        Without a zero plateau at the origin the iterates only tend to 0, so
        that case is rejected up front instead of running out the budget.
        """
        orbit = [Fraction(t)]
        if orbit[0] > 0 and self.pieces[0][2] != 0:
            raise AssertionError("no zero plateau at 0, iterates never reach 0 exactly")
        while orbit[-1] > 0:
            nxt = self(orbit[-1])
            if nxt >= orbit[-1]:
                raise AssertionError(f"iterates fail to decrease at {orbit[-1]}")
            orbit.append(nxt)
            if len(orbit) > max_steps:
                raise AssertionError("iterates did not vanish within the step budget")
        return orbit

    # -- export ------------------------------------------------------------

    def to_json(self, with_float=False):
        doc = {
            "breakpoints": [[str(t), str(v), str(s)] for t, v, s in self.pieces],
            "final": str(self.pieces[-1][1]) if self.final_slope == 0 else None,
        }
        if with_float:
            doc["breakpoints_float"] = [[float(t), float(v), float(s)] for t, v, s in self.pieces]
        return doc

    def to_csv(self, with_float=False) -> str:
        head = "t,value,slope" + (",t_float,value_float,slope_float" if with_float else "")
        rows = [head]
        for t, v, s in self.pieces:
            row = f"{t},{v},{s}"
            if with_float:
                row += f",{float(t)},{float(v)},{float(s)}"
            rows.append(row)
        return "\n".join(rows) + "\n"


def _merge(pieces):
    out = [pieces[0]]
    for t, v, s in pieces[1:]:
        t0, v0, s0 = out[-1]
        if s == s0 and v == v0 + s0 * (t - t0):
            continue
        out.append((t, v, s))
    return tuple(out)


def linear(slope) -> ComparisonFunction:
    return ComparisonFunction(((0, 0, slope),))


def ramp(start, end, slope) -> ComparisonFunction:
    """0 before ``start``, slope*t on [start, end], slope*end afterwards."""
    start, end, slope = Fraction(start), Fraction(end), Fraction(slope)
    if not 0 < start < end:
        raise ValueError("need 0 < start < end")
    return ComparisonFunction(((0, 0, 0), (start, slope * start, slope), (end, slope * end, 0)))


def pointwise_max(functions: Iterable[ComparisonFunction]) -> ComparisonFunction:
    """Exact upper envelope of finitely many piecewise-linear functions."""
    fs = list(functions)
    if not fs:
        raise ValueError("need at least one function")
    cuts = sorted({t for f in fs for t in f.breakpoints})
    points = set(cuts)
    # add crossings of every pair of linear pieces inside each elementary interval
    for a, b in zip(cuts, cuts[1:] + [None]):
        lines = [(f(a), f._piece(a)[2]) for f in fs]
        for i in range(len(lines)):
            for j in range(i + 1, len(lines)):
                (vi, si), (vj, sj) = lines[i], lines[j]
                if si != sj:
                    x = a + (vj - vi) / (si - sj)
                    if x > a and (b is None or x < b):
                        points.add(x)
    starts = sorted(points)
    pieces = []
    for j, t in enumerate(starts):
        nxt = starts[j + 1] if j + 1 < len(starts) else t + 1
        mid = (t + nxt) / 2
        # no input bends or crosses inside (t, nxt), so one line wins there,
        # and right-continuity makes that line's value at t the max at t
        best = max(fs, key=lambda f: f(mid))
        value = max(f(t) for f in fs)
        assert value == best(t), "envelope is not right-continuous"
        pieces.append((t, value, best._piece(mid)[2]))
    return ComparisonFunction(tuple(pieces))


def psi_compose(phi: ComparisonFunction, a) -> ComparisonFunction:
    """psi(t) = sup_{0 <= x <= t} (a x + phi(t - x)), computed exactly.

    Writing u = t - x, psi(t) = a t + max_{u <= t} (phi(u) - a u), a running
    maximum of a piecewise-linear function with upward jumps.
    """
    a = Fraction(a)
    if not 0 < a < 1:
        raise PreconditionError("a must lie in (0, 1)")
    best = None
    running = []  # pieces (start, G(start), slope) of the running max G
    ps = phi.pieces
    for j, (p, v, s) in enumerate(ps):
        q = ps[j + 1][0] if j + 1 < len(ps) else None
        g_p = v - a * p
        sigma = s - a
        if best is None or g_p >= best:
            best = g_p
            rise_from = p
        else:
            running.append((p, best, Fraction(0)))
            rise_from = p + (best - g_p) / sigma if sigma > 0 else None
            if rise_from is not None and q is not None and rise_from >= q:
                rise_from = None
        if rise_from is None:
            continue
        if sigma > 0:
            running.append((rise_from, g_p + sigma * (rise_from - p), sigma))
            if q is not None:
                best = g_p + sigma * (q - p)
        else:
            running.append((p, best, Fraction(0)))
    pieces = []
    for t, g, sg in running:
        if pieces and pieces[-1][0] == t:
            pieces.pop()
        pieces.append((t, a * t + g, a + sg))
    return ComparisonFunction(tuple(pieces))


def psi_candidates(phi: ComparisonFunction, a, t) -> Fraction:
    """Independent evaluation of the supremal convolution at one point.

    phi(u) - a u is linear between breakpoints and can only jump upward, so
    the maximum over [0, t] sits at 0, at t, or at a breakpoint below t.
    """
    a, t = Fraction(a), Fraction(t)
    us = {Fraction(0), t} | {b for b in phi.breakpoints if b <= t}
    return max(a * (t - u) + phi(u) for u in us)
