"""The free Boolean group over ``X = P x K x (omega+1)``.

Elements are finite sets of points under symmetric difference. A
2-valued point map extends uniquely to a homomorphism by XOR over the
points of an element (:func:`hom_eval`).
"""

from __future__ import annotations

from functools import total_ordering
from typing import Iterable, NamedTuple, Optional, Union

from .exceptions import UnassignedPoint

# ultrafilter id used for points of a structureless set X
FLAT = "_"


@total_ordering
class _Omega:
    """The first infinite ordinal; compares above every natural number."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return other is not self

    def __hash__(self):
        return hash("omega")

    def __repr__(self):
        return "OMEGA"

    def __reduce__(self):
        return (_Omega, ())


OMEGA = _Omega()

ExtNat = Union[int, _Omega]


class Point(NamedTuple):
    """A point ``(p, k, n)``: ultrafilter id, generator id, index in omega+1."""

    p: str
    k: str
    n: ExtNat

    @property
    def is_star(self) -> bool:
        return self.n is OMEGA

    @property
    def column(self) -> tuple:
        return (self.p, self.k)

    def to_json(self) -> dict:
        return {"p": self.p, "k": self.k, "n": "omega" if self.n is OMEGA else self.n}

    @classmethod
    def from_json(cls, data) -> "Point":
        if isinstance(data, (list, tuple)):
            p, k, n = data
        else:
            p, k, n = data["p"], data["k"], data["n"]
        return cls.make(p, k, n)

    @classmethod
    def make(cls, p, k, n) -> "Point":
        if n == "omega" or n is OMEGA:
            n = OMEGA
        else:
            if isinstance(n, bool) or int(n) != n or int(n) < 0:
                raise ValueError(f"index must be a natural number or 'omega', got {n!r}")
            n = int(n)
        return cls(str(p), str(k), n)

    @classmethod
    def flat(cls, label) -> "Point":
        """A point of a plain set, encoded under the reserved ultrafilter id."""
        return cls(FLAT, str(label), 0)


class GroupElement:
    """An element of the free Boolean group: a finite set of points."""

    __slots__ = ("points",)

    def __init__(self, points: Iterable[Point] = ()):
        self.points = frozenset(points)

    def __add__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.points ^ other.points)

    __xor__ = __add__

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.points == other.points

    def __hash__(self):
        return hash(self.points)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.sorted())

    def __contains__(self, x):
        return x in self.points

    def __bool__(self):
        return bool(self.points)

    def __repr__(self):
        return "GroupElement({" + ", ".join(map(_fmt_point, self.sorted())) + "})"

    def sorted(self) -> list:
        return sorted(self.points)

    def star_trace(self) -> "GroupElement":
        return GroupElement(x for x in self.points if x.n is OMEGA)

    def without_star(self) -> "GroupElement":
        return GroupElement(x for x in self.points if x.n is not OMEGA)

    def to_json(self) -> list:
        return [x.to_json() for x in self.sorted()]

    @classmethod
    def from_json(cls, data) -> "GroupElement":
        return cls(Point.from_json(x) for x in data)


ZERO = GroupElement()


def _fmt_point(x: Point) -> str:
    n = "w" if x.n is OMEGA else x.n
    return f"({x.p},{x.k},{n})"


def sym_diff(a: GroupElement, b: GroupElement) -> GroupElement:
    return a + b


def star_trace(a: GroupElement) -> GroupElement:
    return a.star_trace()


class TwoValuedMap:
    """A finite assignment of bits to points, optionally total via a default."""

    def __init__(self, assignments: Optional[dict] = None, default: Optional[int] = None):
        self.assignments = dict(assignments or {})
        self.default = default

    def value(self, x: Point) -> int:
        try:
            return self.assignments[x]
        except KeyError:
            if self.default is None:
                raise UnassignedPoint(x) from None
            return self.default

    __call__ = value

    def __contains__(self, x):
        return x in self.assignments

    def __eq__(self, other):
        if not isinstance(other, TwoValuedMap):
            return NotImplemented
        return self.assignments == other.assignments and self.default == other.default

    def __repr__(self):
        return f"TwoValuedMap({len(self.assignments)} points, default={self.default})"

    def to_json(self) -> dict:
        return {
            "default": self.default,
            "assignments": [[x.to_json(), b] for x, b in sorted(self.assignments.items())],
        }

    @classmethod
    def from_json(cls, data: dict) -> "TwoValuedMap":
        return cls({Point.from_json(x): int(b) for x, b in data["assignments"]}, data["default"])


def hom_eval(f, a: GroupElement) -> int:
    """Value of the homomorphic extension of ``f`` at ``a``.

    ``f`` is anything with a ``value(point)`` method returning a bit.
    """
    v = 0
    for x in a.points:
        v ^= f.value(x)
    return v
