"""Input model: finite index-table families and planar affine demo families."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .errors import InstanceError


@dataclass(frozen=True)
class FiniteInstance:
    """``points`` elements 0..N-1 and k self-maps given as lookup tables."""

    points: int
    maps: tuple
    name: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(tuple(m) for m in self.maps))
        _validate_finite(self.points, self.maps)

    @property
    def k(self) -> int:
        return len(self.maps)

    def apply(self, i: int, x: int) -> int:
        """f_i(x) with a 1-based letter ``i``."""
        return self.maps[i - 1][x]

    def image(self, word, subset=None) -> frozenset:
        """f_word(subset), composing right to left; ``subset`` defaults to X."""
        s = set(range(self.points)) if subset is None else set(subset)
        for i in reversed(tuple(word)):
            table = self.maps[i - 1]
            s = {table[x] for x in s}
        return frozenset(s)

    def hutchinson(self, subset) -> frozenset:
        return frozenset(t[x] for t in self.maps for x in subset)

    def restrict(self, subset) -> tuple["FiniteInstance", list]:
        """Sub-instance on an invariant subset, reindexed 0..|subset|-1.

        Returns the instance and the list mapping new indices to old ones.
        """
        old = sorted(set(subset))
        new_of = {x: j for j, x in enumerate(old)}
        maps = []
        for t in self.maps:
            if any(t[x] not in new_of for x in old):
                raise InstanceError("subset is not invariant under every map")
            maps.append(tuple(new_of[t[x]] for x in old))
        return FiniteInstance(len(old), tuple(maps), self.name), old


def _validate_finite(points, maps, path="$"):
    if isinstance(points, bool) or not isinstance(points, int) or points < 1:
        raise InstanceError("points must be a positive integer", f"{path}.points")
    if not maps:
        raise InstanceError("at least one map is required", f"{path}.maps")
    for i, table in enumerate(maps):
        if len(table) != points:
            raise InstanceError(
                f"map {i + 1} has {len(table)} entries, expected {points}", f"{path}.maps[{i}]"
            )
        for x, v in enumerate(table):
            if isinstance(v, bool) or not isinstance(v, int):
                raise InstanceError("entries must be integers", f"{path}.maps[{i}][{x}]")
            if not 0 <= v < points:
                raise InstanceError(
                    f"map {i + 1} sends {x} to {v}, outside [0, {points})", f"{path}.maps[{i}][{x}]"
                )


@dataclass(frozen=True)
class AffineMap:
    """(x, y) -> (a x + b y + e, c x + d y + f)."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction
    e: Fraction
    f: Fraction

    def __call__(self, p):
        x, y = p
        return (self.a * x + self.b * y + self.e, self.c * x + self.d * y + self.f)

    def compose(self, other: "AffineMap") -> "AffineMap":
        """self after other."""
        return AffineMap(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
            self.a * other.e + self.b * other.f + self.e,
            self.c * other.e + self.d * other.f + self.f,
        )


@dataclass(frozen=True)
class AffineInstance:
    maps: tuple
    bbox: tuple  # (x0, y0, x1, y1)
    name: Optional[str] = None

    def __post_init__(self):
        x0, y0, x1, y1 = self.bbox
        if not (x0 < x1 and y0 < y1):
            raise InstanceError("bbox must satisfy x0 < x1 and y0 < y1", "$.bbox")
        if not self.maps:
            raise InstanceError("at least one map is required", "$.maps")
        for i, m in enumerate(self.maps):
            # affine images of a convex box are the hull of the corner images
            for corner in self.corners():
                u, v = m(corner)
                if not (x0 <= u <= x1 and y0 <= v <= y1):
                    raise InstanceError(f"map {i + 1} sends corner {corner} outside bbox", f"$.maps[{i}]")

    @property
    def k(self) -> int:
        return len(self.maps)

    def corners(self):
        x0, y0, x1, y1 = self.bbox
        return [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]


Instance = Union[FiniteInstance, AffineInstance]


@dataclass(frozen=True)
class Fixture:
    name: str
    label: str
    instance: FiniteInstance


def fixtures() -> list:
    return [
        Fixture("T1", "two-constants", FiniteInstance(3, ((0, 0, 0), (1, 1, 1)), "two-constants")),
        Fixture("T2", "binary-shift", FiniteInstance(4, ((0, 0, 1, 1), (2, 2, 3, 3)), "binary-shift")),
        Fixture("T3", "swap-fail", FiniteInstance(2, ((1, 0),), "swap-fail")),
        Fixture("T4", "common-fixed", FiniteInstance(3, ((0, 0, 0), (0, 0, 1)), "common-fixed")),
        Fixture("T5", "bessaga-chain", FiniteInstance(3, ((0, 0, 1),), "bessaga-chain")),
    ]


def fixture(key: str) -> FiniteInstance:
    """Look a fixture up by id (``T2``) or label (``binary-shift``)."""
    for fx in fixtures():
        if key in (fx.name, fx.label):
            return fx.instance
    raise KeyError(key)


def sierpinski() -> AffineInstance:
    half = Fraction(1, 2)
    zero = Fraction(0)
    maps = tuple(
        AffineMap(half, zero, zero, half, Fraction(e), Fraction(f))
        for e, f in [(0, 0), (Fraction(1, 2), 0), (Fraction(1, 4), Fraction(1, 2))]
    )
    return AffineInstance(maps, (zero, zero, Fraction(1), Fraction(1)), "sierpinski")


# -- JSON ----------------------------------------------------------------------

def _rational(value, path) -> Fraction:
    if isinstance(value, bool):
        raise InstanceError("expected a rational, got a boolean", path)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise InstanceError(f"not a rational: {value!r}", path) from None
    raise InstanceError("rationals are integers or 'p/q' strings", path)


def _format_rational(q: Fraction):
    return q.numerator if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_instance(document) -> Instance:
    """Parse JSON text, bytes or an already-decoded mapping into a validated instance."""
    if isinstance(document, (bytes, bytearray)):
        try:
            document = document.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise InstanceError(f"not UTF-8: {exc.reason}") from None
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except (json.JSONDecodeError, RecursionError) as exc:
            raise InstanceError(f"invalid JSON: {exc}") from None
    if not isinstance(document, dict):
        raise InstanceError("instance document must be a JSON object")
    kind = document.get("type")
    name = document.get("name")
    if name is not None and not isinstance(name, str):
        raise InstanceError("name must be a string", "$.name")
    if kind == "finite":
        points = document.get("points")
        maps = document.get("maps")
        if not isinstance(maps, list) or not all(isinstance(m, list) for m in maps):
            raise InstanceError("maps must be a list of integer lists", "$.maps")
        _validate_finite(points, maps)
        return FiniteInstance(points, tuple(tuple(m) for m in maps), name)
    if kind == "affine2d":
        raw_maps = document.get("maps")
        if not isinstance(raw_maps, list):
            raise InstanceError("maps must be a list", "$.maps")
        maps = []
        for i, m in enumerate(raw_maps):
            if not isinstance(m, dict):
                raise InstanceError("affine map must be an object", f"$.maps[{i}]")
            try:
                coeffs = [_rational(m[key], f"$.maps[{i}].{key}") for key in "abcdef"]
            except KeyError as exc:
                raise InstanceError(f"missing coefficient {exc.args[0]}", f"$.maps[{i}]") from None
            maps.append(AffineMap(*coeffs))
        bbox = document.get("bbox")
        if not isinstance(bbox, list) or len(bbox) != 4:
            raise InstanceError("bbox must be [x0, y0, x1, y1]", "$.bbox")
        box = tuple(_rational(v, f"$.bbox[{j}]") for j, v in enumerate(bbox))
        return AffineInstance(tuple(maps), box, name)
    raise InstanceError(f"unknown instance type {kind!r}", "$.type")


def instance_to_dict(inst: Instance) -> dict:
    if isinstance(inst, FiniteInstance):
        doc = {"type": "finite", "points": inst.points, "maps": [list(m) for m in inst.maps]}
    else:
        doc = {
            "type": "affine2d",
            "maps": [{key: _format_rational(getattr(m, key)) for key in "abcdef"} for m in inst.maps],
            "bbox": [_format_rational(v) for v in inst.bbox],
        }
    if inst.name is not None:
        doc["name"] = inst.name
    return doc


def serialize_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst))


def load_instance(spec: str) -> Instance:
    """Read an instance from a file path, or a fixture id/label."""
    try:
        return fixture(spec)
    except KeyError:
        pass
    if spec == "sierpinski":
        return sierpinski()
    try:
        with open(spec, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise InstanceError(f"cannot read {spec}: {exc.strerror}") from None
    return parse_instance(data)


def random_instance(rng: random.Random, points: int, k: int) -> FiniteInstance:
    maps = tuple(tuple(rng.randrange(points) for _ in range(points)) for _ in range(k))
    return FiniteInstance(points, maps, "random")
