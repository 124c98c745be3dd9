"""Shared corpus builders and independent oracles for the test suite."""

from __future__ import annotations

import itertools
import json
import random
from fractions import Fraction
from importlib import resources

from remetrika.instance import fixture, random_instance
from remetrika.monoid import build_automaton, check_condition_a

CORPUS_SEED = 20261015
CORPUS_SIZE = 200

# one "[PASS]/[FAIL] criterion N: ..." line per acceptance criterion, printed at the end
ACCEPTANCE_LINES = []


def gated_random(count: int, seed: int, max_points: int = 5, max_maps: int = 3) -> list:
    """The first ``count`` random instances (N <= max_points, k <= max_maps) that have an attractor."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        inst = random_instance(rng, rng.randint(1, max_points), rng.randint(1, max_maps))
        aut = build_automaton(inst)
        if check_condition_a(aut).ok:
            out.append(aut)
    return out


def fixture_automata(*names) -> list:
    return [build_automaton(fixture(n)) for n in names]


def words_upto(k, length):
    for n in range(length + 1):
        yield from itertools.product(range(1, k + 1), repeat=n)


def compose_word(inst, word):
    """Table of f_w computed pointwise, independent of the automaton."""
    return tuple(_apply(inst, word, x) for x in range(inst.points))


def _apply(inst, word, x):
    for i in reversed(word):
        x = inst.maps[i - 1][x]
    return x


def schema_validator(name: str):
    """jsonschema validator for a shipped schema, resolving sibling references."""
    from jsonschema import Draft202012Validator
    from referencing import Registry, Resource

    base = resources.files("remetrika") / "schemas"
    docs = {p.name: json.loads(p.read_text()) for p in base.iterdir() if p.name.endswith(".json")}
    registry = Registry().with_resources(
        (fname, Resource.from_contents(doc)) for fname, doc in docs.items()
    )
    return Draft202012Validator(docs[name], registry=registry)


def frac_grid(stop, step):
    stop, step = Fraction(stop), Fraction(step)
    n = int(stop / step)
    return [j * step for j in range(n + 1)]
