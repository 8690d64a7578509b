"""Online greedy splitting of a stream of distinct group elements.

Each fed element either contains a point the map has not assigned yet,
in which case the greatest such point is used to steer the element into
the currently smaller class, or it is forced by earlier assignments.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .exceptions import DuplicateElement, EmptyElement
from .group import GroupElement, Point, TwoValuedMap


@dataclass(frozen=True)
class FeedReport:
    element: GroupElement
    value: int
    steered: Optional[Point] = None  # None means the value was forced

    @property
    def kind(self) -> str:
        return "forced" if self.steered is None else "steered"

    def to_json(self) -> dict:
        out = {"element": self.element.to_json(), "value": self.value, "kind": self.kind}
        if self.steered is not None:
            out["point"] = self.steered.to_json()
        return out

    @classmethod
    def from_json(cls, data: dict) -> "FeedReport":
        point = data.get("point")
        return cls(GroupElement.from_json(data["element"]), int(data["value"]),
                   None if point is None else Point.from_json(point))


@dataclass
class SplitterState:
    partial: TwoValuedMap = field(default_factory=TwoValuedMap)
    count0: int = 0
    count1: int = 0
    steered: int = 0
    log: list = field(default_factory=list)
    _seen: set = field(default_factory=set, repr=False)

    def feed(self, a: GroupElement) -> FeedReport:
        if not a:
            raise EmptyElement("cannot split the zero element")
        if a in self._seen:
            raise DuplicateElement(f"{a!r} was already fed")
        assigned = self.partial.assignments
        free = [x for x in a.points if x not in assigned]
        if free:
            x = max(free)
            for y in free:
                if y != x:
                    assigned[y] = 0
            partial = 0
            for y in a.points:
                if y != x:
                    partial ^= assigned[y]
            target = 1 if self.count1 < self.count0 else 0
            assigned[x] = partial ^ target
            value = target
            self.steered += 1
            report = FeedReport(a, value, x)
        else:
            value = 0
            for y in a.points:
                value ^= assigned[y]
            report = FeedReport(a, value)
        if value:
            self.count1 += 1
        else:
            self.count0 += 1
        self._seen.add(a)
        self.log.append(report)
        return report

    def finalize(self) -> TwoValuedMap:
        """The assignments so far, made total with default 0."""
        return TwoValuedMap(self.partial.assignments, default=0)

    @property
    def fed(self) -> int:
        return self.count0 + self.count1

    def summary(self) -> dict:
        return {"count0": self.count0, "count1": self.count1, "steered": self.steered}


def feed(state: SplitterState, a: GroupElement) -> FeedReport:
    return state.feed(a)


def finalize(state: SplitterState) -> TwoValuedMap:
    return state.finalize()
