"""Certificate serialization and replay verification.

A certificate is one JSON object. ``seal`` adds a SHA-256 digest of the
canonical encoding of everything else; ``verify`` recomputes the digest
and then independently replays the recorded construction: oracle
transcripts, group evaluations, the condition chain or the finite-trace
identity, and the claimed statistics. The first failing check raises
:class:`VerificationError` carrying the check's name.
"""

from __future__ import annotations

import hashlib
import json
from typing import Callable, Dict

from .exceptions import VerificationError
from .group import OMEGA, GroupElement, TwoValuedMap, hom_eval
from .oracle import TranscriptEntry, replay
from .splitter import FeedReport, SplitterState

DIGEST_KEY = "digest"


def canonical_bytes(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()


def digest(body: dict) -> str:
    payload = {k: v for k, v in body.items() if k != DIGEST_KEY}
    return hashlib.sha256(canonical_bytes(payload)).hexdigest()


def seal(body: dict) -> dict:
    out = dict(body)
    out[DIGEST_KEY] = digest(out)
    return out


def dump(cert: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(cert, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _fail(check, detail=""):
    raise VerificationError(check, detail)


def replay_oracles(oracles_json: dict) -> dict:
    states = {}
    for p, rec in oracles_json.items():
        if rec["snapshot"]["id"] != p:
            _fail("oracle-replay", f"snapshot id mismatch for {p!r}")
        entries = [TranscriptEntry.from_json(e) for e in rec["transcript"]]
        try:
            states[p] = replay(rec["snapshot"], entries)
        except ValueError as exc:
            _fail("oracle-replay", f"oracle {p!r}: {exc}")
    return states


def check_column_coherent(col, states: dict, check: str) -> None:
    state = states.get(col.owner[0])
    if state is None:
        _fail(check, f"no oracle transcript for {col.owner[0]!r}")
    if col.omega not in (0, 1) or state.decided(col.agreement()) != 1:
        _fail(check, f"column {col.owner} is not coherent under the recorded oracle")


def verify_split(cert: dict) -> dict:
    """Replay a split certificate; returns a short summary on success."""
    # late import: coherent imports nothing from here, keep it that way
    from .coherent import Column, CoherentMap, goal_from_json

    try:
        elements = [GroupElement.from_json(a) for a in cert["elements"]]
        fmap = CoherentMap.from_json(cert["map"])
        values = [int(v) for v in cert["values"]]
    except (KeyError, TypeError, ValueError) as exc:
        _fail("structure", str(exc))
    if len(values) != len(elements):
        _fail("structure", "one value per element required")
    if len(set(elements)) != len(elements):
        _fail("distinct-elements")

    states = replay_oracles(cert["oracles"])
    for col in fmap.columns.values():
        check_column_coherent(col, states, "map-coherence")

    for pos, a in enumerate(elements):
        if hom_eval(fmap, a) != values[pos]:
            _fail("hom-eval", f"element {pos} evaluates to {1 - values[pos]}")
    if cert["class0"] != [i for i, v in enumerate(values) if v == 0] or \
            cert["class1"] != [i for i, v in enumerate(values) if v == 1]:
        _fail("classes")

    if cert["path"] == "infinite":
        _verify_chain(cert, elements, fmap, states, Column, CoherentMap, goal_from_json)
    elif cert["path"] == "finite":
        _verify_finite(cert, elements, fmap, values)
    else:
        _fail("structure", f"unknown path {cert['path']!r}")
    return {"kind": "split", "path": cert["path"], "elements": len(elements),
            "class_sizes": [values.count(0), values.count(1)]}


def _verify_chain(cert, elements, fmap, states, Column, CoherentMap, goal_from_json):
    schedule = cert["schedule"]
    chain = cert["chain"]
    if len(chain) != len(schedule):
        _fail("chain", "one chain step per scheduled goal required")
    P, K, columns = set(), set(), {}
    witnesses = []
    for gi, (goal_json, step) in enumerate(zip(schedule, chain)):
        if step["goal"] != gi:
            _fail("chain", f"step {gi} is labelled {step['goal']}")
        new_P, new_K = set(step["added_p"]), set(step["added_k"])
        if new_P & P or new_K & K:
            _fail("chain-order", f"step {gi} re-adds existing ids")
        P |= new_P
        K |= new_K
        for cj in step["columns"]:
            col = Column.from_json(cj)
            if col.owner in columns:
                _fail("chain-order", f"step {gi} redefines column {col.owner}")
            if col.owner[0] not in P or col.owner[1] not in K:
                _fail("chain-order", f"step {gi} defines column {col.owner} outside P x K")
            check_column_coherent(col, states, "chain-coherence")
            columns[col.owner] = col
        q = CoherentMap(columns.values())

        goal = goal_from_json(goal_json, elements)
        kind = goal_json["goal"]
        if kind == "ultrafilter" and goal.p not in P:
            _fail("goal", f"step {gi}: {goal.p!r} not in P")
        elif kind == "generator" and goal.k not in K:
            _fail("goal", f"step {gi}: {goal.k!r} not in K")
        elif kind == "hit":
            pos = step.get("witness")
            if pos is None or not 0 <= pos < len(elements):
                _fail("goal", f"step {gi}: missing witness")
            a = elements[pos]
            if a in goal.B:
                _fail("goal", f"step {gi}: witness lies in B")
            if any(x.p not in P or x.k not in K for x in a.points):
                _fail("goal", f"step {gi}: witness not covered by the condition")
            if hom_eval(q, a) != goal.i or hom_eval(fmap, a) != goal.i:
                _fail("goal", f"step {gi}: witness does not take value {goal.i}")
            witnesses.append({"goal": gi, "element": pos, "value": goal.i})
    if CoherentMap(columns.values()) != fmap:
        _fail("chain-union", "final map differs from the last condition")
    if witnesses != cert["witnesses"]:
        _fail("witnesses")
    hits = [g for g in schedule if g["goal"] == "hit"]
    counted = [sum(1 for g in hits if g["i"] == i) for i in (0, 1)]
    if cert["stats"].get("hits") != counted:
        _fail("stats", "hit counts")


def _verify_finite(cert, elements, fmap, values):
    stats = cert["stats"]
    I = GroupElement.from_json(stats["I"])
    buckets = {}
    for pos, a in enumerate(elements):
        buckets.setdefault(a.star_trace(), []).append(pos)
    best = min(buckets, key=lambda t: (-len(buckets[t]), t.sorted()))
    if best != I or stats["dominant"] != buckets[I]:
        _fail("bucket", "I is not the dominant star trace")
    if sorted((len(v) for v in buckets.values()), reverse=True) != stats["buckets"]:
        _fail("bucket", "bucket sizes")
    j = hom_eval(fmap, I)
    if stats["j"] != j:
        _fail("trace-identity", "j")
    # rerun the greedy splitter on the dominant bucket
    splitter = SplitterState()
    for pos in buckets[I]:
        a = elements[pos]
        rest = a + I
        if rest:
            report = splitter.feed(rest)
            if hom_eval(fmap, rest) != report.value:
                _fail("splitter-replay", f"element {pos}")
        if values[pos] != hom_eval(fmap, rest) ^ j:
            _fail("trace-identity", f"element {pos}")
    if splitter.steered != stats["steered"]:
        _fail("splitter-replay", "steered count")
    dom = buckets[I]
    dom_classes = [sum(1 for pos in dom if values[pos] == i) for i in (0, 1)]
    if dom_classes != stats["dominant_classes"]:
        _fail("stats", "dominant classes")
    if min(dom_classes) < splitter.steered // 2:
        _fail("balance", f"min class {min(dom_classes)} < {splitter.steered // 2}")
    stars = {x for a in elements for x in a.points if x.n is OMEGA}
    if stats["distinct_star_points"] != len(stars):
        _fail("stats", "distinct star points")
    bound = stats.get("auto_threshold")
    if bound is not None and stats["bounded_trace"] != (len(stars) <= bound):
        _fail("stats", "bounded_trace flag")


def greedy_certificate(state: SplitterState) -> dict:
    """Unsealed certificate of an online greedy run: the full feed log."""
    return {
        "kind": "greedy",
        "reports": [r.to_json() for r in state.log],
        "map": state.finalize().to_json(),
        "summary": state.summary(),
    }


def verify_greedy(cert: dict) -> dict:
    reports = [FeedReport.from_json(r) for r in cert["reports"]]
    for raw, r in zip(cert["reports"], reports):
        if raw["kind"] != r.kind:
            _fail("structure", "report kind disagrees with its steering point")
    fmap = TwoValuedMap.from_json(cert["map"])
    state = SplitterState()
    for pos, r in enumerate(reports):
        got = state.feed(r.element)
        if got != r:
            _fail("splitter-replay", f"report {pos} differs from a fresh replay")
        if min(state.count0, state.count1) < state.steered // 2:
            _fail("balance", f"after feed {pos}")
    if fmap != state.finalize():
        _fail("map", "final map differs from the replayed one")
    for pos, r in enumerate(reports):
        if hom_eval(fmap, r.element) != r.value:
            _fail("hom-eval", f"element {pos}")
    if cert["summary"] != state.summary():
        _fail("stats", "summary")
    return {"kind": "greedy", "elements": len(reports), **state.summary()}


_VERIFIERS: Dict[str, Callable[[dict], dict]] = {"split": verify_split, "greedy": verify_greedy}


def register(kind: str, fn: Callable[[dict], dict]) -> None:
    _VERIFIERS[kind] = fn


def verify(cert: dict) -> dict:
    """Verify any certificate kind. Raises VerificationError on mismatch."""
    if not isinstance(cert, dict):
        _fail("structure", "certificate must be a JSON object")
    if DIGEST_KEY not in cert:
        _fail("digest", "missing")
    if digest(cert) != cert[DIGEST_KEY]:
        _fail("digest", "content does not match the recorded digest")
    return verify_body(cert)


def verify_body(cert: dict) -> dict:
    """Semantic replay only, without the digest check."""
    kind = cert.get("kind")
    if kind not in _VERIFIERS:
        # importing registers the simulator's certificate kinds
        from . import simulate  # noqa: F401
    fn = _VERIFIERS.get(kind)
    if fn is None:
        _fail("structure", f"unknown certificate kind {kind!r}")
    try:
        return fn(cert)
    except VerificationError:
        raise
    except (KeyError, TypeError, ValueError, IndexError, AttributeError) as exc:
        _fail("structure", f"{type(exc).__name__}: {exc}")
