from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from remetrika.comparison import (
    ComparisonFunction,
    linear,
    pointwise_max,
    psi_candidates,
    psi_compose,
    ramp,
)
from remetrika.errors import PreconditionError


def capped_half():
    # t/2 up to 1, then constant
    return ComparisonFunction(((0, 0, F(1, 2)), (1, F(1, 2), 0)))


def test_evaluation_and_merge():
    f = ComparisonFunction(((0, 0, F(1, 2)), (2, 1, F(1, 2)), (4, 2, 0)))
    assert f.pieces == ((0, 0, F(1, 2)), (4, 2, 0))
    assert f(3) == F(3, 2) and f(10) == 2
    g = ComparisonFunction(((0, 0, 0), (1, F(1, 2), 0)))
    assert g(1) == F(1, 2) and g.left_limit(1) == 0


def test_psi_examples():
    assert psi_compose(capped_half(), F(3, 4)) == linear(F(3, 4))
    jump = ComparisonFunction(((0, 0, 0), (1, F(1, 2), 0)))
    assert psi_compose(jump, F(1, 2)) == linear(F(1, 2))
    with pytest.raises(PreconditionError):
        psi_compose(jump, 1)


def grid_sup(phi, a, t, steps=2000):
    # sup over x in [0, t] of a x + phi(t - x), sampled
    return max(a * (t * i / steps) + phi(t - t * i / steps) for i in range(steps + 1))


ramps = st.lists(
    st.tuples(st.fractions(F(1, 8), 4), st.fractions(F(1, 8), 4), st.fractions(F(1, 10), F(9, 10))),
    min_size=1, max_size=4,
).map(lambda rs: pointwise_max(ramp(s, s + w, k) for s, w, k in rs))


@settings(max_examples=60, deadline=None)
@given(ramps, st.fractions(F(1, 10), F(9, 10)))
def test_psi_matches_candidate_oracle(phi, a):
    psi = psi_compose(phi, a)
    assert psi.is_comparison(), psi.failures()
    cuts = sorted(set(phi.breakpoints) | set(psi.breakpoints))
    probes = cuts + [(x + y) / 2 for x, y in zip(cuts, cuts[1:])] + [cuts[-1] + 1, cuts[-1] + 7]
    for t in probes:
        assert psi(t) == psi_candidates(phi, a, t)
        assert psi(t) >= phi(t) and psi(t) >= a * t


@settings(max_examples=15, deadline=None)
@given(ramps, st.fractions(F(1, 10), F(9, 10)))
def test_psi_against_sampled_sup(phi, a):
    psi = psi_compose(phi, a)
    for t in [F(1, 3), F(1), F(5, 2), F(6)]:
        sampled = grid_sup(phi, a, t, 400)
        assert sampled <= psi(t)
        # the integrand has slope at most 1 + a < 2 and jumps up to the right
        # of each u-breakpoint, so one grid step loses at most 2 t / 400
        assert psi(t) - sampled <= 2 * t / 400


def test_pointwise_max_is_exact():
    f = pointwise_max([ramp(F(3, 4), F(5, 4), F(510, 511)), ramp(1, 3, F(1, 2))])
    for t in [0, F(1, 2), F(3, 4), 1, F(5, 4), 2, 3, 9]:
        assert f(t) == max(ramp(F(3, 4), F(5, 4), F(510, 511))(t), ramp(1, 3, F(1, 2))(t))
    assert f.is_comparison()
    crossing = pointwise_max([linear(F(1, 2)), ComparisonFunction(((0, 0, F(3, 4)), (2, F(3, 2), 0)))])
    assert crossing(3) == F(3, 2) and crossing(4) == 2 and F(3) in crossing.breakpoints


@pytest.mark.parametrize("pieces, needle", [
    (((0, 1, 0),), "value 1 at 0"),
    (((0, 0, 2),), "final slope"),
    (((0, 0, F(1, 2)), (1, 0, 0)), "downward jump"),
    (((0, 0, 0), (1, 1, 0)), ">= 1"),
    (((0, 0, -1),), "negative slope"),
    (((0, 0, 1), (1, F(1, 2), 0)), "left limit"),
])
def test_failures_detected(pieces, needle):
    fails = ComparisonFunction(pieces).failures()
    assert any(needle in f for f in fails), fails


def test_orbit_and_iterates():
    f = ComparisonFunction(((0, 0, 0), (1, F(1, 2), 0)))
    assert f.orbit_to_zero(5) == [5, F(1, 2), 0]
    assert linear(F(1, 2)).iterate(8, 3) == 1
    with pytest.raises(AssertionError):
        linear(F(1, 2)).orbit_to_zero(1, max_steps=20)


def test_exports():
    f = capped_half()
    doc = f.to_json(with_float=True)
    assert doc["breakpoints"] == [["0", "0", "1/2"], ["1", "1/2", "0"]] and doc["final"] == "1/2"
    assert doc["breakpoints_float"][1] == [1.0, 0.5, 0.0]
    assert linear(F(1, 2)).to_json()["final"] is None
    assert f.to_csv().splitlines() == ["t,value,slope", "0,0,1/2", "1,1/2,0"]
