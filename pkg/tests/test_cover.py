import pytest

from remetrika.cover import prop36_suite, prop37_suite, x_tilde, y_set, y_set_truncated
from remetrika.instance import fixture
from remetrika.monoid import attractor_info, build_automaton
from remetrika.words import periodic_words, words_up_to


def aut(name):
    return build_automaton(fixture(name))


def test_y_set_examples():
    assert y_set(aut("T2"), (1,)) == {0, 1}
    assert y_set(aut("T1"), (1,)) == {0}
    assert y_set(aut("T1"), ()) == {0, 1}


def test_y_set_matches_truncated_definition():
    for name in ["T1", "T2", "T4", "T5"]:
        a = aut(name)
        betas = periodic_words(a.k, 2, 2) + list(attractor_info(a).addresses.values())
        for w in words_up_to(a.k, 3):
            assert y_set_truncated(a, w, 4, betas) == y_set(a, w)


def test_x_tilde_examples():
    t = x_tilde(aut("T2"), (1, 1))
    assert (t.base, t.limit_part, t.extended) == ({0}, {0}, {0})
    t = x_tilde(aut("T5"), (1,))
    assert (t.base, t.limit_part, t.extended) == ({0, 1}, {0}, {0, 1})
    for name in ["T1", "T2", "T4", "T5"]:
        a = aut(name)
        assert x_tilde(a, ()).extended == set(range(a.points))


@pytest.mark.parametrize("name, depth", [("T2", 3), ("T1", 3), ("T5", 4), ("T4", 4)])
def test_suites_on_fixtures(name, depth):
    a = aut(name)
    for report in (prop36_suite(a, depth), prop37_suite(a, depth)):
        assert report.ok, report.failures()
        assert len(report) >= 5


def test_suite_report_shape():
    report = prop36_suite(aut("T2"), 2)
    ids = [c["id"] for c in report.to_json()]
    assert ids[:6] == ["limit-set-bounds", "cylinder-union-bounds", "limit-set-nested", "limit-intersections", "attractor-part-in-limit-set", "limit-set-forward-invariant"]
    assert all(set(c) == {"id", "pass", "counterexample"} for c in report.to_json())


def test_suites_detect_a_broken_attractor(monkeypatch):
    # pretend the attractor misses a point: the limit-set checks must notice
    import remetrika.cover as cover

    real = cover.attractor_info

    def shrunk(a):
        info = real(a)
        info.attractor = frozenset(sorted(info.attractor)[1:])
        return info

    monkeypatch.setattr(cover, "attractor_info", shrunk)
    assert not prop36_suite(aut("T2"), 2).ok
