"""Pass/fail records shared by the property suites and the certificate."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any


@dataclass(frozen=True)
class Check:
    id: str
    passed: bool
    counterexample: Any = None

    def to_json(self):
        return {"id": self.id, "pass": self.passed, "counterexample": self.counterexample}


class Report(list):
    """A list of :class:`Check` records."""

    def add(self, id, counterexample=None):
        """Record a check that passed iff ``counterexample`` is None."""
        self.append(Check(id, counterexample is None, counterexample))

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self)

    def failures(self):
        return [c for c in self if not c.passed]

    def to_json(self):
        return [c.to_json() for c in self]


def first(iterable):
    """First element of an iterable of counterexamples, or None."""
    for item in iterable:
        return item
    return None
