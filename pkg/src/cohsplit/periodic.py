"""Eventually periodic subsets of the natural numbers.

A set ``S`` is stored as a threshold ``N``, a modulus ``m``, a residue
pattern and a finite prefix::

    n in S  <=>  (n < N and n in prefix) or (n >= N and n % m in residues)

Residues and prefix are kept internally as integer bitmasks so that
intersections over large common moduli stay cheap. Every constructor
returns the canonical form (minimal period, then minimal threshold), so
structural equality is set equality.
"""

from __future__ import annotations

from functools import lru_cache
from math import gcd
from typing import Iterable


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


@lru_cache(maxsize=4096)
def _repunit(width: int, copies: int) -> int:
    # 1 followed by (width-1) zeros, repeated `copies` times
    return ((1 << (width * copies)) - 1) // ((1 << width) - 1)


@lru_cache(maxsize=4096)
def _divisors(m: int) -> tuple:
    small, large = [], []
    d = 1
    while d * d <= m:
        if m % d == 0:
            small.append(d)
            if d * d != m:
                large.append(m // d)
        d += 1
    return tuple(small + large[::-1])


def _widen(pattern: int, modulus: int, target: int) -> int:
    """Repeat a residue pattern mod ``modulus`` to a pattern mod ``target``."""
    if target == modulus:
        return pattern
    return pattern * _repunit(modulus, target // modulus)


class PeriodicSet:
    """An immutable, canonical, eventually periodic subset of N."""

    __slots__ = ("_threshold", "_modulus", "_pattern", "_prefix", "_hash")

    def __init__(self, threshold: int = 0, modulus: int = 1,
                 residues: Iterable[int] = (), prefix: Iterable[int] = ()):
        if threshold < 0:
            raise ValueError("threshold must be a natural number")
        if modulus < 1:
            raise ValueError("modulus must be >= 1")
        pattern = 0
        for r in residues:
            if not 0 <= r < modulus:
                raise ValueError(f"residue {r} outside [0, {modulus})")
            pattern |= 1 << r
        pre = 0
        for n in prefix:
            if not 0 <= n < threshold:
                raise ValueError(f"prefix element {n} outside [0, {threshold})")
            pre |= 1 << n
        self._set_canonical(threshold, modulus, pattern, pre)

    @classmethod
    def _raw(cls, threshold: int, modulus: int, pattern: int, prefix: int) -> "PeriodicSet":
        obj = cls.__new__(cls)
        obj._set_canonical(threshold, modulus, pattern, prefix)
        return obj

    def _set_canonical(self, threshold, modulus, pattern, prefix):
        full = (1 << modulus) - 1
        pattern &= full
        # minimal period of the purely periodic tail
        if pattern == 0 or pattern == full:
            modulus, pattern = 1, (1 if pattern else 0)
        else:
            for d in _divisors(modulus):
                if d == modulus:
                    break
                block = pattern & ((1 << d) - 1)
                if block * _repunit(d, modulus // d) == pattern:
                    modulus, pattern = d, block
                    break
        prefix &= (1 << threshold) - 1
        # the tail rule is purely periodic, so it extends backwards
        while threshold > 0:
            n = threshold - 1
            if ((prefix >> n) & 1) != ((pattern >> (n % modulus)) & 1):
                break
            threshold = n
            prefix &= ~(1 << n)
        self._threshold = threshold
        self._modulus = modulus
        self._pattern = pattern
        self._prefix = prefix
        self._hash = hash((threshold, modulus, pattern, prefix))

    # -- constructors -----------------------------------------------------

    @classmethod
    def empty(cls) -> "PeriodicSet":
        return cls._raw(0, 1, 0, 0)

    @classmethod
    def naturals(cls) -> "PeriodicSet":
        return cls._raw(0, 1, 1, 0)

    @classmethod
    def finite(cls, elements: Iterable[int]) -> "PeriodicSet":
        elements = list(elements)
        if any(n < 0 for n in elements):
            raise ValueError("negative element")
        top = max(elements, default=-1) + 1
        return cls(threshold=top, modulus=1, residues=(), prefix=elements)

    @classmethod
    def cofinite(cls, missing: Iterable[int]) -> "PeriodicSet":
        return cls.finite(missing).complement()

    @classmethod
    def residue_class(cls, residue: int, modulus: int) -> "PeriodicSet":
        return cls(0, modulus, [residue % modulus])

    # -- accessors --------------------------------------------------------

    @property
    def threshold(self) -> int:
        return self._threshold

    @property
    def modulus(self) -> int:
        return self._modulus

    @property
    def residues(self) -> tuple:
        return tuple(r for r in range(self._modulus) if (self._pattern >> r) & 1)

    @property
    def prefix(self) -> tuple:
        return tuple(n for n in range(self._threshold) if (self._prefix >> n) & 1)

    def __contains__(self, n: int) -> bool:
        return self.member(n)

    def member(self, n: int) -> bool:
        if n < 0:
            return False
        if n < self._threshold:
            return bool((self._prefix >> n) & 1)
        return bool((self._pattern >> (n % self._modulus)) & 1)

    def is_infinite(self) -> bool:
        return self._pattern != 0

    def is_finite(self) -> bool:
        return self._pattern == 0

    def is_cofinite(self) -> bool:
        return self._pattern == (1 << self._modulus) - 1

    def is_empty(self) -> bool:
        return self._pattern == 0 and self._prefix == 0

    def elements_below(self, bound: int) -> list:
        return [n for n in range(bound) if self.member(n)]

    # -- Boolean algebra --------------------------------------------------

    def complement(self) -> "PeriodicSet":
        return PeriodicSet._raw(
            self._threshold,
            self._modulus,
            ~self._pattern & ((1 << self._modulus) - 1),
            ~self._prefix & ((1 << self._threshold) - 1),
        )

    def _combine(self, other: "PeriodicSet", op) -> "PeriodicSet":
        m = _lcm(self._modulus, other._modulus)
        n = max(self._threshold, other._threshold)
        pattern = op(_widen(self._pattern, self._modulus, m),
                     _widen(other._pattern, other._modulus, m))
        prefix = 0
        for k in range(n):
            if op(int(self.member(k)), int(other.member(k))):
                prefix |= 1 << k
        return PeriodicSet._raw(n, m, pattern, prefix)

    def intersect(self, other: "PeriodicSet") -> "PeriodicSet":
        return self._combine(other, lambda a, b: a & b)

    def union(self, other: "PeriodicSet") -> "PeriodicSet":
        return self._combine(other, lambda a, b: a | b)

    def difference(self, other: "PeriodicSet") -> "PeriodicSet":
        return self.intersect(other.complement())

    def issubset(self, other: "PeriodicSet") -> bool:
        return self.difference(other).is_empty()

    __and__ = intersect
    __or__ = union
    __sub__ = difference
    __invert__ = complement
    __le__ = issubset

    def __eq__(self, other):
        if not isinstance(other, PeriodicSet):
            return NotImplemented
        return (self._threshold == other._threshold
                and self._modulus == other._modulus
                and self._pattern == other._pattern
                and self._prefix == other._prefix)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return (f"PeriodicSet(threshold={self._threshold}, modulus={self._modulus}, "
                f"residues={list(self.residues)}, prefix={list(self.prefix)})")

    # -- JSON -------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "threshold": self._threshold,
            "modulus": self._modulus,
            "residues": list(self.residues),
            "prefix": list(self.prefix),
        }

    @classmethod
    def from_json(cls, data: dict) -> "PeriodicSet":
        return cls(int(data["threshold"]), int(data["modulus"]),
                   [int(r) for r in data["residues"]], [int(n) for n in data["prefix"]])


# module-level aliases mirroring the operation names
def member(s: PeriodicSet, n: int) -> bool:
    return s.member(n)


def complement(s: PeriodicSet) -> PeriodicSet:
    return s.complement()


def intersect(s: PeriodicSet, t: PeriodicSet) -> PeriodicSet:
    return s.intersect(t)


def union(s: PeriodicSet, t: PeriodicSet) -> PeriodicSet:
    return s.union(t)


def is_infinite(s: PeriodicSet) -> bool:
    return s.is_infinite()


def is_cofinite(s: PeriodicSet) -> bool:
    return s.is_cofinite()
