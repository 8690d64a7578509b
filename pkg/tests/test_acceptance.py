"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest -m acceptance`` or ``python tests/test_acceptance.py``.
Certificates produced by criteria 3 to 8 are collected in ``EMITTED`` and
re-verified by criterion 9 in a separate interpreter.
"""

from __future__ import annotations

import copy
import json
import random
import subprocess
import sys
import tempfile
import time
from pathlib import Path

import pytest

from cohsplit.certificates import greedy_certificate, seal, verify, verify_body
from cohsplit.coherent import (
    AddGenerator,
    AddUltrafilter,
    CoherentMap,
    Column,
    Hit,
    canonical_schedule,
    coherent_split,
    extend_coherently,
    forcing_split,
    leq,
)
from cohsplit.exceptions import VerificationError
from cohsplit.generate import generate_stream
from cohsplit.group import OMEGA, GroupElement, Point, TwoValuedMap, hom_eval
from cohsplit.oracle import OracleState, TranscriptEntry, replay
from cohsplit.periodic import PeriodicSet
from cohsplit.simulate import OpenBox, SimConfig, witness_no_convergence, witness_selective
from cohsplit.splitter import SplitterState

pytestmark = pytest.mark.acceptance

EMITTED: dict = {}  # name -> sealed certificate
_DONE: dict = {}    # criterion -> (ok, detail)


def _line(n, ok, detail):
    return f"[acceptance] criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})"


def _run(n, fn):
    if n not in _DONE:
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failed criterion, reported as such
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        _DONE[n] = (ok, f"{detail}; {time.perf_counter() - t0:.2f}s")
    return _DONE[n]


@pytest.fixture
def report(capsys):
    def emit(n, fn):
        ok, detail = _run(n, fn)
        with capsys.disabled():
            print("\n" + _line(n, ok, detail))
        assert ok, detail
    return emit


# -- random inputs ----------------------------------------------------------------


def random_set(rng, max_threshold=10, max_modulus=12):
    kind = rng.random()
    if kind < 0.15:
        return PeriodicSet.finite(rng.sample(range(40), rng.randint(0, 5)))
    if kind < 0.3:
        return PeriodicSet.cofinite(rng.sample(range(40), rng.randint(0, 5)))
    threshold = rng.randint(0, max_threshold)
    modulus = rng.randint(1, max_modulus)
    residues = [r for r in range(modulus) if rng.random() < 0.5]
    prefix = [i for i in range(threshold) if rng.random() < 0.5]
    return PeriodicSet(threshold, modulus, residues, prefix)


def random_point(rng, ps=("p", "q", "r"), ks=("a", "b", "c", "d"), depth=6):
    n = OMEGA if rng.random() < 0.2 else rng.randrange(depth)
    return Point(rng.choice(ps), rng.choice(ks), n)


def random_element(rng, size=5):
    return GroupElement({random_point(rng) for _ in range(rng.randint(0, size))})


# -- criterion 1 ------------------------------------------------------------------


def criterion_1():
    rng = random.Random(1)
    state = OracleState("p")
    answered = []
    violations = 0
    t0 = time.perf_counter()
    for _ in range(10_000):
        s = random_set(rng)
        a = state.query(s)
        answered.append((s, a))
        violations += not state.meet.is_infinite()
        violations += s.is_finite() and a != 0
        violations += s.is_cofinite() and a != 1
        violations += state.query(~s) != 1 - a
    elapsed = time.perf_counter() - t0
    pairs = 0
    for _ in range(1000):
        (s, a), (t, b) = rng.sample(answered, 2)
        pairs += 1
        if s <= t and a and not b:
            violations += 1
        violations += state.query(s & t) != (a & b)
        violations += state.query(s | t) != (a | b)
    ok = violations == 0 and elapsed < 5
    return ok, f"{violations} violations, 10000 queries in {elapsed:.2f}s, {pairs} pair checks"


def test_criterion_1_oracle_laws(report):
    report(1, criterion_1)


# -- criterion 2 ------------------------------------------------------------------


def criterion_2():
    rng = random.Random(2)
    violations = 0
    t0 = time.perf_counter()
    for case in range(10_000):
        a, b, c = (random_element(rng) for _ in range(3))
        violations += (a + b) + c != a + (b + c)
        violations += a + b != b + a
        violations += a + a != GroupElement()
        violations += a + GroupElement() != a
        if case % 2:
            f = TwoValuedMap({random_point(rng): rng.randrange(2) for _ in range(8)}, default=0)
        else:
            f = CoherentMap(Column((p, k), random_set(rng, 4, 4), rng.randrange(2))
                            for p in ("p", "q") for k in ("a", "b") if rng.random() < 0.7)
        violations += hom_eval(f, a + b) != hom_eval(f, a) ^ hom_eval(f, b)
    elapsed = time.perf_counter() - t0
    return violations == 0 and elapsed < 5, f"{violations} violations in 10000 cases, {elapsed:.2f}s"


def test_criterion_2_group_laws(report):
    report(2, criterion_2)


# -- criterion 3 ------------------------------------------------------------------


def criterion_3():
    worst, violations, streams = 0.0, 0, 0
    for kind in ("star-free", "star-rich", "mixed"):
        for seed in range(20):
            stream = generate_stream(kind, 10_000, seed, n_ultrafilters=4, n_generators=25, depth=10)
            t0 = time.perf_counter()
            state = SplitterState()
            for a in stream:
                state.feed(a)
                violations += min(state.count0, state.count1) < state.steered // 2
            f = state.finalize()
            violations += sum(hom_eval(f, r.element) != r.value for r in state.log)
            worst = max(worst, time.perf_counter() - t0)
            streams += 1
            EMITTED[f"c3-{kind}-{seed}"] = seal(greedy_certificate(state))
    ok = violations == 0 and worst < 10
    return ok, f"{streams} streams, {violations} violations, slowest {worst:.2f}s"


def test_criterion_3_splitting_balance(report):
    report(3, criterion_3)


# -- criterion 4 ------------------------------------------------------------------


def criterion_4():
    rng = random.Random(4)
    mismatches = 0
    t0 = time.perf_counter()
    for inst in range(200):
        points = [Point.flat(i) for i in range(rng.randint(1, 8))]
        subsets = set()
        target = rng.randint(1, 12)
        for _ in range(200):
            if len(subsets) == target:
                break
            s = frozenset(rng.sample(points, rng.randint(1, len(points))))
            subsets.add(s)
        family = [GroupElement(s) for s in sorted(subsets, key=sorted)]
        state = SplitterState()
        for a in family:
            state.feed(a)
        greedy = min(state.count0, state.count1)
        best = 0
        masks = [sum(1 << points.index(x) for x in a.points) for a in family]
        for f in range(1 << len(points)):
            ones = sum(bin(f & m).count("1") & 1 for m in masks)
            best = max(best, min(ones, len(family) - ones))
        mismatches += best < greedy or greedy < state.steered // 2
        EMITTED[f"c4-{inst}"] = seal(greedy_certificate(state))
    elapsed = time.perf_counter() - t0
    return mismatches == 0 and elapsed < 60, f"{mismatches} mismatches over 200 instances"


def test_criterion_4_brute_force(report):
    report(4, criterion_4)


# -- criterion 5 ------------------------------------------------------------------


def criterion_5():
    rng = random.Random(5)
    oracles = {}
    raw = [Column((rng.choice("pqr"), f"k{i}"), random_set(rng)) for i in range(1000)]
    ext = extend_coherently(raw, oracles)
    replayed = {p: replay({"id": p, "commitments": []},
                          [TranscriptEntry.from_json(e.to_json()) for e in s.transcript])
                for p, s in oracles.items()}
    violations = sum(replayed[c.owner[0]].decided(c.agreement()) != 1 for c in ext)
    violations += sum(c.ones != r.ones for c, r in zip(ext, raw))
    again = extend_coherently(ext, oracles)
    violations += sum(a != b for a, b in zip(again, ext))
    return violations == 0, f"{violations} violations over 1000 columns"


def test_criterion_5_coherent_extension(report):
    report(5, criterion_5)


# -- criterion 6 ------------------------------------------------------------------


def criterion_6():
    stream = generate_stream("star-rich", 2000, seed=6, n_ultrafilters=4, n_generators=16)
    schedule = canonical_schedule(stream, 180)
    ids = [g for g in schedule if isinstance(g, (AddUltrafilter, AddGenerator))]
    hits = [g for g in schedule if isinstance(g, Hit)]
    t0 = time.perf_counter()
    cert = forcing_split(stream, schedule, {})
    elapsed = time.perf_counter() - t0
    chain_ok = all(leq(q, r) for r, q in zip(cert.conditions, cert.conditions[1:]))
    body = seal(cert.to_json())
    verify(body)  # goals met, columns coherent, witnesses, union
    EMITTED["c6"] = body
    sizes = (len(cert.class0), len(cert.class1))
    ok = (len(schedule) == 200 and len(hits) == 180 and chain_ok
          and min(sizes) >= 90 and elapsed < 30)
    return ok, (f"{len(ids)} id goals + {len(hits)} hits, classes {sizes[0]}/{sizes[1]}, "
                f"run {elapsed:.2f}s")


def test_criterion_6_forcing_run(report):
    report(6, criterion_6)


# -- criterion 7 ------------------------------------------------------------------


def criterion_7():
    violations, checked = 0, 0
    details = []
    for seed in range(5):
        stream = generate_stream("bucketed", 3000, seed, n_buckets=3, dominant=0.7)
        cert = coherent_split(stream, 3000, "finite", {})
        stats = cert.stats
        I = GroupElement.from_json(stats["I"])
        j = stats["j"]
        for pos in stats["dominant"]:
            a = stream[pos]
            violations += hom_eval(cert.map, a) != hom_eval(cert.map, a + I) ^ j
            checked += 1
        s = stats["steered"]
        violations += min(stats["dominant_classes"]) < s // 2
        violations += cert.min_class < s // 2
        details.append(f"{len(stats['dominant'])}:{cert.min_class}>={s // 2}")
        EMITTED[f"c7-{seed}"] = seal(cert.to_json())
    return violations == 0, f"{checked} identities, {violations} violations, buckets {' '.join(details)}"


def test_criterion_7_finite_trace(report):
    report(7, criterion_7)


# -- criterion 8 ------------------------------------------------------------------


def big_config(rng, n_coords=200, n_gens=10, block=10):
    coords = [f"c{i}" for i in range(n_coords)]
    gens = [f"g{i}" for i in range(n_gens)]
    oracles = {"p": OracleState("p"), "q": OracleState("q")}
    index_sets = {g: frozenset(coords[i * block:(i + 1) * block]) for i, g in enumerate(gens[:5])}
    targets = {(p, g): {b: random_set(rng, 4, 6) for b in index_sets[g]}
               for p in oracles for g in index_sets}
    coord_maps = {}
    for b in coords[n_gens * block:]:
        raw = [Column((p, g), random_set(rng, 4, 6)) for p in oracles for g in gens
               if b not in index_sets.get(g, ()) and rng.random() < 0.3]
        coord_maps[b] = CoherentMap(extend_coherently(raw, oracles))
    return SimConfig(oracles, gens, coords, index_sets, targets, coord_maps)


def criterion_8():
    rng = random.Random(8)
    cfg = big_config(rng)
    boxes = [OpenBox({b: rng.randrange(2) for b in rng.sample(cfg.coords, rng.randint(1, 4))})
             for _ in range(50)]
    t0 = time.perf_counter()
    sel = witness_selective(cfg, "p", boxes)
    t_sel = time.perf_counter() - t0
    in_box = all(box.constraints.get(b, bit) == bit
                 for bits, box in zip(sel["points"], boxes) for b, bit in zip(cfg.coords, bits))
    sealed = seal(sel)
    verify(sealed)
    EMITTED["c8a"] = sealed
    cases = {c["case"] for c in sel["coordinates"]}

    family, seen = [], set()
    while len(family) < 100:
        E = GroupElement({Point(rng.choice("pq"), rng.choice(cfg.generators), rng.randrange(30))
                          for _ in range(rng.randint(1, 3))})
        if E not in seen:
            seen.add(E)
            family.append((None, E))
    t0 = time.perf_counter()
    ref = witness_no_convergence(cfg, family)
    t_ref = time.perf_counter() - t0
    fbeta = CoherentMap.from_json(ref["split"]["map"])
    exact = all(ref["g_beta"][m] == hom_eval(fbeta, E) for m, (_, E) in enumerate(family))
    sizes = [len(c) for c in ref["classes"]]
    sealed = seal(ref)
    verify(sealed)
    EMITTED["c8b"] = sealed
    ok = (in_box and cases == {1, 2} and t_sel < 10 and exact
          and min(sizes) >= ref["s"] // 2 and t_ref < 10)
    return ok, (f"(a) 50 boxes in {t_sel:.2f}s, cases {sorted(cases)}; "
                f"(b) classes {sizes[0]}/{sizes[1]} vs s={ref['s']} in {t_ref:.2f}s")


def test_criterion_8_construction_simulator(report):
    report(8, criterion_8)


# -- criterion 9 ------------------------------------------------------------------

# keys whose 0/1 values carry the construction itself; flipping any of them
# must be caught by replay, not only by the digest
SEMANTIC = {"value", "values", "omega", "answer", "limit", "points", "g", "g_beta", "j", "i"}


def flip_sites(obj, path=()):
    if isinstance(obj, dict):
        for k, v in obj.items():
            if k not in ("digest", "manifest"):
                yield from flip_sites(v, path + (k,))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from flip_sites(v, path + (i,))
    elif type(obj) is int and obj in (0, 1):
        yield path


def flipped(cert, path):
    """Copy of ``cert`` with one bit flipped; only the containers on the path are copied."""
    out = node = copy.copy(cert)
    for key in path[:-1]:
        node[key] = copy.copy(node[key])
        node = node[key]
    node[path[-1]] ^= 1
    return out


def detected(check, cert):
    try:
        check(cert)
    except VerificationError:
        return True
    return False


def criterion_9():
    for n, fn in ((3, criterion_3), (4, criterion_4), (6, criterion_6), (7, criterion_7),
                  (8, criterion_8)):
        _run(n, fn)
    with tempfile.TemporaryDirectory() as tmp:
        paths = []
        for name, cert in sorted(EMITTED.items()):
            path = Path(tmp) / f"{name}.json"
            path.write_text(json.dumps(cert))
            paths.append(str(path))
        proc = subprocess.run([sys.executable, "-m", "cohsplit.cli", "verify", *paths],
                              capture_output=True, text=True)
    fresh_ok = proc.returncode == 0 and proc.stdout.count("OK ") == len(paths)

    rng = random.Random(9)
    flips = missed_digest = missed_semantic = semantic = 0
    for name, cert in sorted(EMITTED.items()):
        sites = list(flip_sites(cert))
        # small certificates are flipped exhaustively, large ones by sample
        if len(sites) > 60:
            sites = rng.sample(sites, 60 if name.startswith(("c6", "c7", "c8")) else 4)
        for path in sites:
            bad = flipped(cert, path)
            flips += 1
            missed_digest += not detected(verify, bad)
            if SEMANTIC & {k for k in path if isinstance(k, str)}:
                semantic += 1
                missed_semantic += not detected(verify_body, bad)
    ok = fresh_ok and missed_digest == 0 and missed_semantic == 0
    return ok, (f"{len(paths)} certificates verified in a fresh process: {fresh_ok}; "
                f"{flips} flips, {missed_digest} missed; {semantic} semantic flips, "
                f"{missed_semantic} missed by replay")


def test_criterion_9_replay_integrity(report):
    report(9, criterion_9)


if __name__ == "__main__":
    results = []
    for n, fn in enumerate((criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                            criterion_6, criterion_7, criterion_8, criterion_9), 1):
        ok, detail = _run(n, fn)
        print(_line(n, ok, detail), flush=True)
        results.append(ok)
    sys.exit(0 if all(results) else 1)
