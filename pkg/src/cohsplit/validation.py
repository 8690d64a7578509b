"""Input validation helpers shared by the estimators and the CLI."""

from __future__ import annotations

from typing import Iterable

from .exceptions import DuplicateElement, EmptyElement, EmptyInput
from .group import GroupElement, Point


def check_point(x) -> Point:
    if isinstance(x, Point):
        return x
    if isinstance(x, dict) or (isinstance(x, (list, tuple)) and len(x) == 3):
        return Point.from_json(x)
    raise TypeError(f"cannot read a point from {x!r}")


def check_element(a) -> GroupElement:
    """Coerce a GroupElement, or an iterable of points, to a GroupElement."""
    if isinstance(a, GroupElement):
        return a
    if isinstance(a, (str, bytes)):
        raise TypeError("an element is an iterable of points, not a string")
    points = [check_point(x) for x in a]
    if len(set(points)) != len(points):
        raise ValueError("an element lists the same point twice")
    return GroupElement(points)


def check_family(X: Iterable, *, distinct: bool = True, allow_empty_elements: bool = False,
                 min_size: int = 1) -> list:
    """Validate a family of elements and return it as a list of GroupElements."""
    family = [check_element(a) for a in X]
    if len(family) < min_size:
        raise EmptyInput(f"expected at least {min_size} element(s), got {len(family)}")
    if not allow_empty_elements:
        for pos, a in enumerate(family):
            if not a:
                raise EmptyElement(f"element at position {pos} is the zero element")
    if distinct:
        seen = {}
        for pos, a in enumerate(family):
            if a in seen:
                raise DuplicateElement(f"element at position {pos} repeats position {seen[a]}")
            seen[a] = pos
    return family
