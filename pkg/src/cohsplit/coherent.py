"""Coherent splitting maps on ``X = P x K x (omega+1)``.

A map is coherent when, for every column ``(p, k)``, its value at
``omega`` is the ``p``-limit of the column's values along ``n``.
Columns are stored as ``(ones, omega)`` with ``ones`` a
:class:`PeriodicSet`, which makes that condition a single oracle query
on the agreement set.

Two routes produce a coherent map splitting a stream of elements:

* :func:`split_finite_trace` when only finitely many ``omega``-points
  occur: split the parts off one dominant star trace greedily and extend
  coherently.
* :func:`forcing_split` otherwise: walk a descending chain of finite
  conditions meeting a schedule of dense goals.

:func:`coherent_split` dispatches between them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .exceptions import (
    DuplicateElement,
    EmptyInput,
    IncoherentResult,
    NoWitness,
    PreconditionError,
)
from .group import OMEGA, GroupElement, Point, hom_eval
from .oracle import FiniteValuedSequence, OracleState, p_limit
from .periodic import PeriodicSet
from .splitter import SplitterState

FINITE, INFINITE, AUTO = "finite", "infinite", "auto"


@dataclass(frozen=True)
class Column:
    """The restriction of a map to ``{(p, k)} x (omega+1)``."""

    owner: tuple
    ones: PeriodicSet
    omega: Optional[int] = None

    def value(self, n) -> int:
        if n is OMEGA:
            if self.omega is None:
                raise PreconditionError(f"column {self.owner} has no omega value yet")
            return self.omega
        return int(self.ones.member(n))

    def agreement(self) -> PeriodicSet:
        """``{n : f(p,k,n) = f(p,k,omega)}``."""
        return self.ones if self.omega == 1 else self.ones.complement()

    @property
    def is_zero(self) -> bool:
        return self.omega == 0 and self.ones.is_empty()

    @classmethod
    def zero(cls, owner) -> "Column":
        return cls(tuple(owner), PeriodicSet.empty(), 0)

    def to_json(self) -> dict:
        return {"p": self.owner[0], "k": self.owner[1],
                "ones": self.ones.to_json(), "omega": self.omega}

    @classmethod
    def from_json(cls, data: dict) -> "Column":
        omega = data.get("omega")
        return cls((str(data["p"]), str(data["k"])), PeriodicSet.from_json(data["ones"]),
                   None if omega is None else int(omega))


class CoherentMap:
    """A map on X described by finitely many columns; 0 on every other point."""

    def __init__(self, columns: Iterable[Column] = ()):
        self.columns = {c.owner: c for c in columns}

    def value(self, x: Point) -> int:
        col = self.columns.get((x.p, x.k))
        return 0 if col is None else col.value(x.n)

    __call__ = value

    def nonzero_columns(self) -> list:
        return [self.columns[o] for o in sorted(self.columns) if not self.columns[o].is_zero]

    def __eq__(self, other):
        if not isinstance(other, CoherentMap):
            return NotImplemented
        return self.nonzero_columns() == other.nonzero_columns()

    def __repr__(self):
        return f"CoherentMap({len(self.nonzero_columns())} nonzero columns)"

    def to_json(self) -> dict:
        return {"default": 0, "columns": [c.to_json() for c in self.nonzero_columns()]}

    @classmethod
    def from_json(cls, data: dict) -> "CoherentMap":
        if data.get("default", 0) != 0:
            raise ValueError("coherent maps are 0 outside their listed columns")
        return cls(Column.from_json(c) for c in data["columns"])


def _oracle(oracles: dict, p: str) -> OracleState:
    state = oracles.get(p)
    if state is None:
        state = oracles[p] = OracleState(p)
    return state


def is_coherent_column(col: Column, oracles: dict) -> bool:
    return _oracle(oracles, col.owner[0]).query(col.agreement()) == 1


def extend_coherently(columns: Iterable[Column], oracles: dict) -> list:
    """Give every column its unique coherent value at omega."""
    out = []
    for col in columns:
        omega = p_limit(_oracle(oracles, col.owner[0]), FiniteValuedSequence.two_valued(col.ones))
        ext = Column(col.owner, col.ones, omega)
        if not is_coherent_column(ext, oracles):
            raise IncoherentResult(f"column {col.owner} failed its coherence check")
        out.append(ext)
    return out


# -- forcing conditions -----------------------------------------------------


@dataclass(frozen=True)
class Condition:
    """A finite approximation ``<P, K, f>`` to a coherent map."""

    P: frozenset = frozenset()
    K: frozenset = frozenset()
    columns: Mapping = field(default_factory=dict)

    def covers(self, x: Point) -> bool:
        return x.p in self.P and x.k in self.K

    def value(self, x: Point) -> int:
        return self.columns[(x.p, x.k)].value(x.n)

    def as_map(self) -> CoherentMap:
        return CoherentMap(self.columns.values())

    def summary(self) -> dict:
        return {"P": sorted(self.P), "K": sorted(self.K)}


EMPTY_CONDITION = Condition()


def leq(q: Condition, r: Condition) -> bool:
    """``q <= r``: q is stronger, i.e. extends r."""
    if not (r.P <= q.P and r.K <= q.K):
        return False
    return all(q.columns.get(owner) == col for owner, col in r.columns.items())


@dataclass(frozen=True)
class AddUltrafilter:
    p: str

    def to_json(self, index=None):
        return {"goal": "ultrafilter", "p": self.p}


@dataclass(frozen=True)
class AddGenerator:
    k: str

    def to_json(self, index=None):
        return {"goal": "generator", "k": self.k}


@dataclass(frozen=True)
class Hit:
    """Find ``a`` outside ``B`` on which the map takes value ``i``.

    With ``cumulative=True`` the witnesses recorded earlier in the same
    run are added to ``B`` when the goal is met.
    """

    B: frozenset = frozenset()
    i: int = 0
    cumulative: bool = False

    def to_json(self, index=None):
        # elements of B are written as stream positions
        B = sorted(index[a] for a in self.B) if index is not None else [b.to_json() for b in self.B]
        return {"goal": "hit", "B": B, "i": self.i}


def goal_from_json(data: dict, elements: Sequence[GroupElement] = None):
    kind = data["goal"]
    if kind == "ultrafilter":
        return AddUltrafilter(str(data["p"]))
    if kind == "generator":
        return AddGenerator(str(data["k"]))
    if kind == "hit":
        if elements is not None:
            B = frozenset(elements[int(b)] for b in data["B"])
        else:
            B = frozenset(GroupElement.from_json(b) for b in data["B"])
        return Hit(B, int(data["i"]), bool(data.get("cumulative", False)))
    raise ValueError(f"unknown goal kind {kind!r}")


def _extend_ids(r: Condition, new_P, new_K, special=None) -> dict:
    """Columns for ``new_P x new_K``: r's columns, ``special`` ones, zero elsewhere."""
    columns = dict(r.columns)
    special = special or {}
    for p in new_P:
        for k in new_K:
            owner = (p, k)
            if owner not in columns:
                columns[owner] = special.get(owner) or Column.zero(owner)
    return columns


def _certify(q: Condition, r: Condition, oracles: dict) -> None:
    for owner, col in q.columns.items():
        if owner not in r.columns and not is_coherent_column(col, oracles):
            raise IncoherentResult(f"column {owner} of the new condition is not coherent")


def _meet(r: Condition, goal, A: Sequence[GroupElement], oracles: dict):
    """Return ``(q, witness_position)``; the position is None for id goals."""
    if isinstance(goal, AddUltrafilter):
        if goal.p in r.P:
            return r, None
        P = r.P | {goal.p}
        q = Condition(P, r.K, _extend_ids(r, P, r.K))
        _certify(q, r, oracles)
        return q, None
    if isinstance(goal, AddGenerator):
        if goal.k in r.K:
            return r, None
        K = r.K | {goal.k}
        q = Condition(r.P, K, _extend_ids(r, r.P, K))
        _certify(q, r, oracles)
        return q, None
    if not isinstance(goal, Hit):
        raise TypeError(f"not a dense goal: {goal!r}")

    B = goal.B
    blocked = {x for b in B for x in b.points if x.n is OMEGA}
    found = None
    for pos, a in enumerate(A):
        if a in B:
            continue
        fresh = [x for x in a.points
                 if x.n is OMEGA and x not in blocked and not r.covers(x)]
        if fresh:
            found = pos, a, min(fresh)
            break
    if found is None:
        raise NoWitness("no element of the available prefix has a star point outside F")
    pos, a, steer = found
    p0, k0 = steer.p, steer.k

    P = r.P | {x.p for x in a.points}
    K = r.K | {x.k for x in a.points}
    j = 0
    for x in a.points:
        if r.covers(x):
            j ^= r.value(x)
    l = goal.i ^ j
    in_a = [x.n for x in a.points if (x.p, x.k) == (p0, k0) and x.n is not OMEGA]
    ones = PeriodicSet.cofinite(in_a) if l else PeriodicSet.empty()
    steering = Column((p0, k0), ones, l)
    q = Condition(P, K, _extend_ids(r, P, K, {(p0, k0): steering}))
    _certify(q, r, oracles)
    if hom_eval(q, a) != goal.i:
        raise IncoherentResult(f"witness does not take value {goal.i}")
    return q, pos


def meet_dense(r: Condition, goal, A: Sequence[GroupElement], oracles: dict) -> Condition:
    """A condition below ``r`` inside the dense set named by ``goal``."""
    return _meet(r, goal, A, oracles)[0]


# -- certificates of a split ------------------------------------------------


class _Recorder:
    """Tracks which oracle queries belong to one run."""

    def __init__(self, oracles: dict):
        self.oracles = oracles
        self.start = {p: (s.snapshot(), len(s.transcript)) for p, s in oracles.items()}

    def export(self) -> dict:
        out = {}
        for p in sorted(self.oracles):
            state = self.oracles[p]
            snap, offset = self.start.get(p, ({"id": p, "commitments": []}, 0))
            entries = state.transcript[offset:]
            if entries or p in self.start:
                out[p] = {"snapshot": snap, "transcript": [e.to_json() for e in entries]}
        return out


@dataclass
class SplitCertificate:
    path: str
    elements: list
    map: CoherentMap
    values: list
    oracles: dict
    schedule: list = field(default_factory=list)
    chain: list = field(default_factory=list)
    witnesses: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    conditions: list = field(default_factory=list, repr=False)  # in-memory only

    @property
    def class0(self) -> list:
        return [i for i, v in enumerate(self.values) if v == 0]

    @property
    def class1(self) -> list:
        return [i for i, v in enumerate(self.values) if v == 1]

    @property
    def min_class(self) -> int:
        return min(len(self.class0), len(self.class1))

    def to_json(self) -> dict:
        return {
            "kind": "split",
            "path": self.path,
            "elements": [a.to_json() for a in self.elements],
            "map": self.map.to_json(),
            "values": list(self.values),
            "class0": self.class0,
            "class1": self.class1,
            "oracles": self.oracles,
            "schedule": self.schedule,
            "chain": self.chain,
            "witnesses": self.witnesses,
            "stats": self.stats,
        }


def _check_distinct(elements: Sequence[GroupElement]) -> None:
    seen = set()
    for pos, a in enumerate(elements):
        if a in seen:
            raise DuplicateElement(f"element at position {pos} repeats an earlier one")
        seen.add(a)


def _classify(fmap, elements) -> list:
    return [hom_eval(fmap, a) for a in elements]


def forcing_split(A: Sequence[GroupElement], schedule: Sequence, oracles: dict) -> SplitCertificate:
    """Meet every goal of ``schedule`` along a descending chain of conditions."""
    A = list(A)
    _check_distinct(A)
    index = {a: pos for pos, a in enumerate(A)}
    rec = _Recorder(oracles)
    r = EMPTY_CONDITION
    conditions = [r]
    chain, resolved, witnesses = [], [], []
    recorded = set()
    for gi, goal in enumerate(schedule):
        if isinstance(goal, Hit):
            if not goal.B <= index.keys():
                raise PreconditionError(f"goal #{gi}: B is not a subset of the stream")
            if goal.cumulative:
                goal = Hit(goal.B | recorded, goal.i)
        try:
            q, pos = _meet(r, goal, A, oracles)
        except NoWitness as exc:
            raise NoWitness(str(exc), gi) from None
        step = {
            "goal": gi,
            "added_p": sorted(q.P - r.P),
            "added_k": sorted(q.K - r.K),
            "columns": [c.to_json() for o, c in sorted(q.columns.items())
                        if o not in r.columns and not c.is_zero],
        }
        if pos is not None:
            step["witness"] = pos
            witnesses.append({"goal": gi, "element": pos, "value": goal.i})
            recorded.add(A[pos])
        chain.append(step)
        resolved.append(goal.to_json(index))
        conditions.append(q)
        r = q
    fmap = r.as_map()
    values = _classify(fmap, A)
    hits = [g for g in resolved if g["goal"] == "hit"]
    stats = {
        "hits": [sum(1 for g in hits if g["i"] == 0), sum(1 for g in hits if g["i"] == 1)],
        "final": r.summary(),
    }
    return SplitCertificate(INFINITE, A, fmap, values, rec.export(), resolved, chain,
                            witnesses, stats, conditions)


def split_finite_trace(A: Sequence[GroupElement], cutoff: int, oracles: dict,
                       trace_bound: Optional[int] = None) -> SplitCertificate:
    """Split a stream meeting only finitely many omega-points."""
    elements = list(A)[:cutoff]
    if not elements:
        raise EmptyInput("nothing to split")
    _check_distinct(elements)
    rec = _Recorder(oracles)

    buckets = {}
    for pos, a in enumerate(elements):
        buckets.setdefault(a.star_trace(), []).append(pos)
    I = min(buckets, key=lambda t: (-len(buckets[t]), t.sorted()))
    dominant = buckets[I]

    splitter = SplitterState()
    fed = []
    for pos in dominant:
        rest = elements[pos] + I
        if rest:
            splitter.feed(rest)
            fed.append(pos)
    g = splitter.finalize()

    ones = {}
    for a in elements:
        for x in a.points:
            ones.setdefault((x.p, x.k), set())
    for x, bit in g.assignments.items():
        if bit:
            ones[(x.p, x.k)].add(x.n)
    raw = [Column(o, PeriodicSet.finite(ns)) for o, ns in sorted(ones.items())]
    fmap = CoherentMap(extend_coherently(raw, oracles))

    j = hom_eval(fmap, I)
    values = _classify(fmap, elements)
    for pos, report in zip(fed, splitter.log):
        if values[pos] != report.value ^ j:
            raise IncoherentResult(f"element {pos} breaks f(a) = f(a - I) + j")

    dom0 = sum(1 for pos in dominant if values[pos] == 0)
    stars = {x for a in elements for x in a.points if x.n is OMEGA}
    bound = trace_bound if trace_bound is not None else math.isqrt(len(elements) - 1) + 1
    stats = {
        "I": I.to_json(),
        "j": j,
        "buckets": sorted(len(v) for v in buckets.values())[::-1],
        "dominant": dominant,
        "steered": splitter.steered,
        "dominant_classes": [dom0, len(dominant) - dom0],
        "distinct_star_points": len(stars),
        "bounded_trace": len(stars) <= bound,
    }
    return SplitCertificate(FINITE, elements, fmap, values, rec.export(), stats=stats)


def canonical_schedule(elements: Sequence[GroupElement], hits: int) -> list:
    """Identity goals that cannot block a Hit, then ``hits`` alternating Hits.

    Ids of the axis carrying more distinct star ids are only added by the
    Hit goals themselves: meeting them up front would put every star point
    inside ``F`` and leave no witness in a finite prefix.
    """
    ps = sorted({x.p for a in elements for x in a.points})
    ks = sorted({x.k for a in elements for x in a.points})
    star_ps = {x.p for a in elements for x in a.points if x.n is OMEGA}
    star_ks = {x.k for a in elements for x in a.points if x.n is OMEGA}
    if len(star_ps) > len(star_ks):
        ps = [p for p in ps if p not in star_ps]
    else:
        ks = [k for k in ks if k not in star_ks]
    goals = [AddUltrafilter(p) for p in ps] + [AddGenerator(k) for k in ks]
    goals += [Hit(frozenset(), t % 2, cumulative=True) for t in range(hits)]
    return goals


def auto_threshold(cutoff: int) -> int:
    return math.isqrt(max(cutoff, 1) - 1) + 1  # ceil(sqrt(cutoff))


def coherent_split(A: Sequence[GroupElement], cutoff: int, star_mode: str = AUTO,
                   oracles: Optional[dict] = None, schedule_length: Optional[int] = None,
                   threshold: Optional[int] = None) -> SplitCertificate:
    """A coherent map splitting the first ``cutoff`` elements of ``A``."""
    oracles = {} if oracles is None else oracles
    elements = list(A)[:cutoff]
    if not elements:
        raise EmptyInput("nothing to split")
    _check_distinct(elements)
    stars = {x for a in elements for x in a.points if x.n is OMEGA}
    bound = auto_threshold(cutoff) if threshold is None else threshold
    if star_mode == AUTO:
        star_mode = INFINITE if len(stars) > bound else FINITE
    if star_mode == FINITE:
        cert = split_finite_trace(elements, cutoff, oracles, trace_bound=bound)
    elif star_mode == INFINITE:
        hits = len(elements) // 2 if schedule_length is None else schedule_length
        cert = forcing_split(elements, canonical_schedule(elements, hits), oracles)
    else:
        raise ValueError(f"unknown star mode {star_mode!r}")
    cert.stats["auto_threshold"] = bound
    return cert


def clopen_certificate(fmap, elements: Sequence[GroupElement]) -> dict:
    """Sort elements into the clopen halves ``U_i`` = preimage of ``i``."""
    values = _classify(fmap, elements)
    U0 = [i for i, v in enumerate(values) if v == 0]
    U1 = [i for i, v in enumerate(values) if v == 1]
    return {
        "U0": U0,
        "U1": U1,
        "sizes": [len(U0), len(U1)],
        "both_nonempty": bool(U0) and bool(U1),
    }
