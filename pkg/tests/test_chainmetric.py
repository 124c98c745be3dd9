import json
from fractions import Fraction as F

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from remetrika.chainmetric import (
    MetricMatrix,
    WeightSequence,
    brute_chain_matrix,
    brute_chain_oracle,
    constant,
    discreteness_check,
    dmu_exact,
    dmu_truncated,
    frozen_at,
    frozen_halved,
    geometric,
    parse_mu,
    prop38_suite,
    prop310_311_suite,
    weight_at,
    weight_limit,
)
from remetrika.errors import PreconditionError, ResourceError
from remetrika.instance import FiniteInstance, fixture
from remetrika.monoid import build_automaton, check_condition_a, max_finite_depth, subset_profiles

HALF = geometric(F(1, 2))


def aut(name):
    return build_automaton(fixture(name))


def test_weight_examples():
    assert weight_at(HALF, 3) == F(1, 8)
    assert weight_at(frozen_at(HALF, 2), 5) == F(1, 4)
    assert weight_at(frozen_halved(HALF, 2, 3), 6) == F(1, 8)
    assert weight_at(frozen_halved(HALF, 2, 3), 5) == F(1, 4)
    assert weight_limit(HALF) == 0 and weight_limit(constant(3)) == 3


def test_block_tail():
    mu = WeightSequence((F(4), F(2)), 3, F(1, 2))
    assert [mu.value_at(n) for n in range(9)] == [4, 2, 1, 1, 1, F(1, 2), F(1, 2), F(1, 2), F(1, 4)]


@pytest.mark.parametrize("bad", [(), (0,), (1, 2)])
def test_weight_validation(bad):
    with pytest.raises(ValueError):
        WeightSequence(bad)


sequences = st.builds(
    lambda pre, block, ratio: WeightSequence(tuple(sorted(pre, reverse=True)), block, ratio),
    st.lists(st.fractions(F(1, 8), 2), min_size=1, max_size=4),
    st.integers(1, 3),
    st.fractions(F(1, 10), 1),
)


@given(sequences, st.integers(0, 30))
def test_weights_nonincreasing(mu, n):
    assert 0 < mu.value_at(n + 1) <= mu.value_at(n)
    assert mu.value_at(n) >= mu.limit()


def test_parse_mu(tmp_path):
    assert parse_mu("constant:2") == constant(2)
    assert parse_mu("geometric:9/10") == geometric(F(9, 10))
    p = tmp_path / "mu.json"
    p.write_text(json.dumps({"prefix": ["1", "1/2"], "block_len": 2, "ratio": "1/3"}))
    assert parse_mu(f"file:{p}") == WeightSequence((1, F(1, 2)), 2, F(1, 3))
    for bad in ["geometric:2", "constant:-1", "spiral:1", "file:/nonexistent"]:
        with pytest.raises(PreconditionError):
            parse_mu(bad)


def test_dmu_exact_examples():
    d = dmu_exact(aut("T2"), HALF)
    assert (d[0][1], d[2][3], d[0][2], d[0][3]) == (F(1, 2), F(1, 2), 1, 1)
    d = dmu_exact(aut("T1"), HALF)
    assert all(d[x][y] == 1 for x in range(3) for y in range(3) if x != y)


def test_truncated_examples():
    d = dmu_truncated(aut("T2"), HALF, 0)
    assert all(d[x][y] == 1 for x in range(4) for y in range(4) if x != y)
    assert dmu_truncated(aut("T2"), HALF, 1)[0][1] == F(1, 2)
    d = dmu_truncated(aut("T5"), HALF, 2)
    assert (d[1][2], d[0][1], d[0][2]) == (1, F(1, 2), 1)


def test_brute_oracle_examples():
    assert brute_chain_oracle(aut("T2"), HALF, 4, 5, 0, 1) == F(1, 2)
    assert brute_chain_oracle(aut("T1"), HALF, 3, 4, 0, 2) == 1
    assert brute_chain_oracle(aut("T5"), HALF, 3, 4, 1, 2) == 1
    assert brute_chain_oracle(aut("T5"), HALF, 3, 4, 1, 1) == 0


def test_brute_oracle_budget():
    with pytest.raises(ResourceError):
        brute_chain_oracle(aut("T2"), HALF, 6, 5, 0, 1, budget=10)


small_instances = st.integers(1, 5).flatmap(lambda n: st.lists(
    st.lists(st.integers(0, n - 1), min_size=n, max_size=n).map(tuple), min_size=1, max_size=3,
).map(lambda maps: FiniteInstance(n, tuple(maps))))


@settings(max_examples=80, deadline=None)
@given(small_instances, st.sampled_from([constant(1), HALF, geometric(F(9, 10)), WeightSequence((3, 2, 2, 1))]))
def test_exact_matches_brute_oracle(inst, mu):
    a = build_automaton(inst)
    assume(check_condition_a(a).ok)
    assert max_finite_depth(a) <= 6
    assert dmu_exact(a, mu) == brute_chain_matrix(a, mu, 6, len(subset_profiles(a)))


def test_monotone_in_mu(corpus):
    small, large = geometric(F(1, 3)), geometric(F(1, 2))
    for a in corpus:
        assert dmu_exact(a, small).le(dmu_exact(a, large))
        assert dmu_exact(a, large).le(dmu_exact(a, constant(1)))


def test_infinite_nodes_are_removable(corpus):
    for a in corpus[:60]:
        assert dmu_exact(a, HALF) == dmu_exact(a, HALF, keep_infinite=True)


@pytest.mark.parametrize("name, mu", [("T2", HALF), ("T1", constant(1)), ("T5", HALF), ("T4", geometric(F(9, 10)))])
def test_chain_metric_suite_on_fixtures(name, mu):
    report = prop38_suite(aut(name), mu)
    assert report.ok, report.failures()
    if mu == constant(1):
        assert "metric-for-constant-weights" in [c.id for c in report]


def test_lower_bound_off_attractor_on_t5():
    a = aut("T5")
    d = dmu_exact(a, HALF)
    assert d[2][0] == 1 == HALF.value_at(0)


@pytest.mark.parametrize("name, m_star", [("T2", 1), ("T1", 0), ("T5", 1)])
def test_truncation_suite(name, m_star):
    a = aut(name)
    assert max_finite_depth(a) == m_star
    report = prop310_311_suite(a, HALF, 4)
    assert report.ok, report.failures()
    assert dmu_truncated(a, HALF, m_star) == dmu_exact(a, HALF)


def test_discreteness_off_attractor():
    for name in ["T1", "T4", "T5"]:
        assert discreteness_check(aut(name), HALF).ok


def test_matrix_helpers():
    m = MetricMatrix([[0, 1, 3], [1, 0, 1], [3, 1, 0]])
    assert not m.is_metric()
    assert any("triangle" in f for f in m.axiom_failures())
    m = MetricMatrix([[0, 1], [1, 0]])
    assert m.is_metric() and m.max() == 1 and m.values() == [1]
    assert m.to_json() == [["0", "1"], ["1", "0"]]
    assert m.scaled(F(1, 2))[0][1] == F(1, 2)
