"""Cylinder sets X_w, limit sets Y_w and extended cylinders.

On a finite instance every nested cylinder chain reaches its limit point at
finite depth, so the limit set of a word is just the attractor points inside
its cylinder and the extended cylinder equals the plain one.  The original
definition, truncated at a finite depth, is kept as an independent check.
"""

from __future__ import annotations

from dataclasses import dataclass

from .checks import Report, first
from .monoid import (
    MonoidAutomaton,
    attractor_info,
    evaluate_address,
    image_of_word,
    singleton_depth,
)
from .words import PeriodicWord, format_periodic, format_word, periodic_words, prefix, words_up_to


@dataclass(frozen=True)
class ExtendedCylinder:
    word: tuple
    base: frozenset
    limit_part: frozenset
    extended: frozenset


def y_set(aut: MonoidAutomaton, word, attractor=None) -> frozenset:
    if attractor is None:
        attractor = attractor_info(aut).attractor
    return frozenset(attractor) & image_of_word(aut, word)


def y_set_truncated(aut: MonoidAutomaton, word, depth: int, betas) -> frozenset:
    """Points a_beta over ``betas`` with X_word meeting X_[beta]_n for all n <= depth."""
    base = image_of_word(aut, word)
    out = set()
    for beta in betas:
        if all(base & image_of_word(aut, prefix(beta, n)) for n in range(depth + 1)):
            out.add(evaluate_address(aut, beta))
    return frozenset(out)


def x_tilde(aut: MonoidAutomaton, word, attractor=None) -> ExtendedCylinder:
    base = image_of_word(aut, word)
    limit = y_set(aut, word, attractor)
    extended = base | limit
    assert extended == base, "extended cylinder differs from the cylinder on a finite instance"
    return ExtendedCylinder(tuple(word), base, limit, extended)


def _sample(aut: MonoidAutomaton):
    return periodic_words(aut.k, 1, 2)


def _fmt_set(s):
    return sorted(s)


def prop36_suite(aut: MonoidAutomaton, depth: int) -> Report:
    info = attractor_info(aut)
    A = info.attractor
    words = list(words_up_to(aut.k, depth))
    sample = _sample(aut)
    stab = singleton_depth(aut)
    inst = aut.instance
    rep = Report()

    def img(w):
        return image_of_word(aut, w)

    def Y(w):
        return y_set(aut, w, A)

    rep.add("limit-set-bounds", first(
        format_word(w) for w in words
        if not (inst.image(w, A) <= Y(w) <= A)
    ))
    rep.add("cylinder-union-bounds", first(
        format_word(w) for w in words
        if not (img(w) <= img(w) | Y(w) <= img(w) | A)
    ))
    rep.add("limit-set-nested", first(
        f"{format_periodic(a)} n={n}" for a in sample for n in range(depth + stab)
        if not Y(prefix(a, n + 1)) <= Y(prefix(a, n))
    ))
    counter = None
    for a in sample:
        prefixes = [prefix(a, n) for n in range(stab + len(a.pre) + len(a.period) + 1)]
        xs = frozenset.intersection(*[img(p) for p in prefixes])
        ys = frozenset.intersection(*[Y(p) for p in prefixes])
        both = frozenset.intersection(*[img(p) | Y(p) for p in prefixes])
        target = frozenset({evaluate_address(aut, a)})
        if both != xs | ys or ys != target:
            counter = format_periodic(a)
            break
    rep.add("limit-intersections", counter)
    rep.add("attractor-part-in-limit-set", first(format_word(w) for w in words if not (A & img(w)) <= Y(w)))
    rep.add("limit-set-forward-invariant", first(
        f"{i}.{format_word(w)}" for w in words for i in range(1, aut.k + 1)
        if not inst.image((i,), Y(w)) <= Y((i,) + tuple(w))
    ))
    # the closed form agrees with the truncated original definition
    betas = sample + list(info.addresses.values())
    rep.add("Y-truncated", first(
        format_word(w) for w in words
        if y_set_truncated(aut, w, stab + 2, betas) != Y(w)
    ))
    return rep


def prop37_suite(aut: MonoidAutomaton, depth: int) -> Report:
    info = attractor_info(aut)
    A = info.attractor
    words = list(words_up_to(aut.k, depth))
    sample = _sample(aut)
    stab = singleton_depth(aut)
    inst = aut.instance
    rep = Report()

    def XT(w):
        return x_tilde(aut, w, A).extended

    rep.add("extended-nested", first(
        f"{format_periodic(a)} n={n}" for a in sample for n in range(depth + stab)
        if not XT(prefix(a, n + 1)) <= XT(prefix(a, n))
    ))
    rep.add("extended-shrinks-to-point", first(
        format_periodic(a) for a in sample
        if frozenset.intersection(*[XT(prefix(a, n)) for n in range(stab + len(a.pre) + 1)])
        != {evaluate_address(aut, a)}
    ))

    # finite form of the catch check: if X_w meets XT([beta]_n) for all n up to the
    # stabilization depth then a_beta lies in XT(w)
    def c_fails(w, beta):
        base = image_of_word(aut, w)
        hits = all(base & XT(prefix(beta, n)) for n in range(stab + len(beta.pre) + 1))
        return hits and evaluate_address(aut, beta) not in XT(w)

    rep.add("extended-catches-limits", first(
        f"{format_word(w)} {format_periodic(b)}" for w in words for b in sample if c_fails(w, b)
    ))

    def d_fails(a, b):
        if evaluate_address(aut, a) == evaluate_address(aut, b):
            return False
        n0 = stab + max(len(a.pre), len(b.pre))
        return bool(XT(prefix(a, n0)) & XT(prefix(b, n0)))

    rep.add("extended-separates", first(
        f"{format_periodic(a)} {format_periodic(b)}" for a in sample for b in sample if d_fails(a, b)
    ))
    rep.add("extended-forward-invariant", first(
        f"{i}.{format_word(w)}" for w in words for i in range(1, aut.k + 1)
        if not inst.image((i,), XT(w)) <= XT((i,) + tuple(w))
    ))
    return rep
