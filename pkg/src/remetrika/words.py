"""Finite and eventually periodic words over the alphabet {1, ..., k}.

A finite word is a plain tuple of 1-based letters; the empty tuple is the
empty word.  An infinite word ``u v v v ...`` is a :class:`PeriodicWord`,
always stored in canonical form (primitive period, minimal preperiod) so
that structural equality coincides with equality of the infinite sequences.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence, Union

Word = tuple  # tuple[int, ...]

EMPTY: Word = ()


def _primitive_root(v: Word) -> Word:
    n = len(v)
    for d in range(1, n + 1):
        if n % d == 0 and v[:d] * (n // d) == v:
            return v[:d]
    return v


def _canonical(pre: Word, period: Word) -> tuple[Word, Word]:
    period = _primitive_root(period)
    while pre and pre[-1] == period[-1]:
        pre = pre[:-1]
        period = period[-1:] + period[:-1]
    return pre, period


@dataclass(frozen=True, init=False)
class PeriodicWord:
    """The infinite word ``pre + period + period + ...``."""

    pre: Word
    period: Word

    def __init__(self, pre: Sequence[int] = (), period: Sequence[int] = (1,)):
        pre, period = tuple(pre), tuple(period)
        if not period:
            raise ValueError("period must be nonempty")
        pre, period = _canonical(pre, period)
        object.__setattr__(self, "pre", pre)
        object.__setattr__(self, "period", period)

    def letter(self, k: int) -> int:
        """The k-th letter, 1-based position."""
        if k < 1:
            raise IndexError(k)
        if k <= len(self.pre):
            return self.pre[k - 1]
        return self.period[(k - len(self.pre) - 1) % len(self.period)]

    def letters(self) -> Iterator[int]:
        yield from self.pre
        yield from itertools.cycle(self.period)

    def __str__(self) -> str:
        return format_periodic(self)


def concat(u: Sequence[int], v: Sequence[int]) -> Word:
    return tuple(u) + tuple(v)


def concat_inf(u: Sequence[int], v: PeriodicWord) -> PeriodicWord:
    return PeriodicWord(tuple(u) + v.pre, v.period)


def prefix(alpha: Union[PeriodicWord, Sequence[int]], n: int) -> Word:
    """First ``n`` letters of ``alpha``."""
    if n < 0:
        raise ValueError("prefix length must be nonnegative")
    if isinstance(alpha, PeriodicWord):
        return tuple(itertools.islice(alpha.letters(), n))
    alpha = tuple(alpha)
    if n > len(alpha):
        raise IndexError(f"prefix of length {n} of a word of length {len(alpha)}")
    return alpha[:n]


def shift(i: int, alpha: PeriodicWord) -> PeriodicWord:
    """Prepend the letter ``i``."""
    return PeriodicWord((i,) + alpha.pre, alpha.period)


def _mismatch_horizon(alpha: PeriodicWord, beta: PeriodicWord) -> tuple[int, int]:
    head = max(len(alpha.pre), len(beta.pre))
    cycle = math.lcm(len(alpha.period), len(beta.period))
    return head, cycle


def code_distance(alpha: PeriodicWord, beta: PeriodicWord) -> Fraction:
    """Exact value of sum_k [alpha_k != beta_k] / 3^k."""
    head, cycle = _mismatch_horizon(alpha, beta)
    total = Fraction(0)
    for k in range(1, head + 1):
        if alpha.letter(k) != beta.letter(k):
            total += Fraction(1, 3**k)
    # beyond the preperiods the mismatch pattern repeats every `cycle` letters
    block = Fraction(0)
    for k in range(head + 1, head + cycle + 1):
        if alpha.letter(k) != beta.letter(k):
            block += Fraction(1, 3**k)
    return total + block / (1 - Fraction(1, 3**cycle))


def same_sequence(alpha: PeriodicWord, beta: PeriodicWord) -> bool:
    """Compare the infinite sequences letter by letter over a sufficient horizon."""
    head, cycle = _mismatch_horizon(alpha, beta)
    return prefix(alpha, head + 2 * cycle) == prefix(beta, head + 2 * cycle)


def words_up_to(k: int, length: int) -> Iterator[Word]:
    """All words over {1..k} of length 0..length, shortest first."""
    for n in range(length + 1):
        yield from itertools.product(range(1, k + 1), repeat=n)


def periodic_words(k: int, max_pre: int, max_period: int) -> list[PeriodicWord]:
    """Distinct canonical periodic words with bounded preperiod and period."""
    seen = {}
    for p in range(0, max_pre + 1):
        for q in range(1, max_period + 1):
            for pre in itertools.product(range(1, k + 1), repeat=p):
                for per in itertools.product(range(1, k + 1), repeat=q):
                    w = PeriodicWord(pre, per)
                    seen.setdefault(w, None)
    return list(seen)


# -- text form ---------------------------------------------------------------

def format_word(w: Sequence[int]) -> str:
    w = tuple(w)
    if any(a > 9 for a in w):
        return ",".join(str(a) for a in w)
    return "".join(str(a) for a in w)


def format_periodic(w: PeriodicWord) -> str:
    return f"{format_word(w.pre)}({format_word(w.period)})"


def parse_word(text: str) -> Word:
    text = text.strip()
    if not text or text == "λ":
        return ()
    if "," in text:
        letters = tuple(int(t) for t in text.split(","))
    else:
        letters = tuple(int(c) for c in text)
    if any(a < 1 for a in letters):
        raise ValueError(f"letters are 1-based: {text!r}")
    return letters


def parse_periodic(text: str) -> PeriodicWord:
    text = text.strip()
    if not text.endswith(")") or "(" not in text:
        raise ValueError(f"expected u(v), got {text!r}")
    head, _, tail = text[:-1].partition("(")
    return PeriodicWord(parse_word(head.rstrip(",")), parse_word(tail))
