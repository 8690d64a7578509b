"""A lazily decided free ultrafilter on N.

An :class:`OracleState` never knows the whole ultrafilter. It keeps the
sets it has committed to, and their intersection ``meet``, and answers
each membership question so that the committed family always has
infinite intersection. A set is *decided* once ``meet`` forces the
answer: ``meet - S`` finite forces ``S in p``, ``meet & S`` finite forces
``S not in p``. Undecided sets are committed (yes-bias).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Optional, Sequence

from .exceptions import InvariantViolation, MalformedPartition
from .periodic import PeriodicSet


@dataclass
class TranscriptEntry:
    oracle: str
    query: PeriodicSet
    answer: int
    committed: Optional[PeriodicSet]

    def to_json(self) -> dict:
        return {
            "oracle": self.oracle,
            "query": self.query.to_json(),
            "answer": self.answer,
            "committed": None if self.committed is None else self.committed.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "TranscriptEntry":
        committed = data.get("committed")
        return cls(
            oracle=str(data["oracle"]),
            query=PeriodicSet.from_json(data["query"]),
            answer=int(data["answer"]),
            committed=None if committed is None else PeriodicSet.from_json(committed),
        )


@dataclass
class OracleState:
    """Single-owner mutable state of one simulated ultrafilter ``p``."""

    id: str
    commitments: list = field(default_factory=list)
    transcript: list = field(default_factory=list)
    meet: PeriodicSet = field(init=False, repr=False)

    def __post_init__(self):
        meet = PeriodicSet.naturals()
        for s in self.commitments:
            if not s.is_infinite():
                raise InvariantViolation(f"oracle {self.id}: finite commitment {s!r}")
            meet = meet & s
        if not meet.is_infinite():
            raise InvariantViolation(f"oracle {self.id}: inconsistent commitments")
        self.meet = meet

    def decided(self, s: PeriodicSet) -> Optional[int]:
        """The forced answer for ``s``, or None when still open."""
        if (self.meet - s).is_finite():
            return 1
        if (self.meet & s).is_finite():
            return 0
        return None

    def query(self, s: PeriodicSet) -> int:
        answer = self.decided(s)
        committed = None
        if answer is None:
            self.commitments.append(s)
            self.meet = self.meet & s
            committed = s
            answer = 1
        if not self.meet.is_infinite():
            raise InvariantViolation(f"oracle {self.id}: meet became finite")
        self.transcript.append(TranscriptEntry(self.id, s, answer, committed))
        return answer

    def snapshot(self) -> dict:
        """JSON form of the commitments only (the replay starting point)."""
        return {"id": self.id, "commitments": [s.to_json() for s in self.commitments]}

    @classmethod
    def from_snapshot(cls, data: dict) -> "OracleState":
        return cls(str(data["id"]), [PeriodicSet.from_json(s) for s in data["commitments"]])

    def copy(self) -> "OracleState":
        return OracleState(self.id, list(self.commitments))


def query(state: OracleState, s: PeriodicSet) -> int:
    return state.query(s)


@dataclass(frozen=True)
class FiniteValuedSequence:
    """A sequence with finitely many values, given by the cell of each value."""

    cells: tuple

    def __init__(self, cells: Sequence):
        object.__setattr__(self, "cells", tuple((label, s) for label, s in cells))

    def check_partition(self) -> None:
        seen = PeriodicSet.empty()
        for label, cell in self.cells:
            if not (seen & cell).is_empty():
                raise MalformedPartition(f"cell for {label!r} overlaps an earlier cell")
            seen = seen | cell
        if seen != PeriodicSet.naturals():
            raise MalformedPartition("cells do not cover N")

    @classmethod
    def two_valued(cls, ones: PeriodicSet) -> "FiniteValuedSequence":
        """The 0/1 sequence that is 1 exactly on ``ones``."""
        return cls([(1, ones), (0, ones.complement())])


def p_limit(state: OracleState, seq: FiniteValuedSequence) -> Hashable:
    """Label of the unique cell that belongs to the ultrafilter."""
    seq.check_partition()
    for label, cell in seq.cells:
        if state.query(cell):
            return label
    # a partition of N always has a cell in p
    raise InvariantViolation(f"oracle {state.id}: no cell of a partition was accepted")


def replay(snapshot: dict, entries: Sequence[TranscriptEntry]) -> OracleState:
    """Rebuild an oracle from its snapshot and re-run a transcript.

    Raises ValueError naming the first entry whose answer or commitment
    differs from the recorded one.
    """
    state = OracleState.from_snapshot(snapshot)
    for i, entry in enumerate(entries):
        if entry.oracle != state.id:
            raise ValueError(f"entry {i} belongs to oracle {entry.oracle!r}")
        answer = state.query(entry.query)
        got = state.transcript[-1]
        if answer != entry.answer or got.committed != entry.committed:
            raise ValueError(f"entry {i}: recorded answer {entry.answer}, replayed {answer}")
    return state
