"""Finite-stage simulation of the dense subgroup construction in ``Z_2^coords``.

Points ``z(p, alpha, n)`` live in ``Z_2^coords`` over a finite coordinate
pool. On the coordinates of the block ``I_alpha`` they follow a target
sequence ``y(p, alpha, n)``; on every other coordinate ``beta`` they read
the coherent map ``f_beta`` at ``(p, alpha, n)``. Targets are eventually
periodic in ``n`` so their ``p``-limits are oracle queries.

Two kinds of witness are produced:

* :func:`witness_selective` picks, for a list of open boxes, points
  ``x_n`` in the boxes together with a common ``p``-limit and a per
  coordinate reason why it is one.
* :func:`witness_no_convergence` takes a faithfully indexed family
  ``g_m = sum of z over E_m``, allocates a fresh coordinate whose map
  splits ``{E_m}`` and reports both halves of the split.

The infinite enumerations that guarantee a suitable block or coordinate
exists are replaced by allocation of fresh ones, bounded by optional
capacities.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .certificates import _fail, check_column_coherent, register, replay_oracles, verify_split
from .coherent import AUTO, CoherentMap, _Recorder, coherent_split
from .exceptions import (
    ConfigExhausted,
    InconsistentFamily,
    MissingTarget,
    NotFaithfullyIndexed,
    PreconditionError,
)
from .group import OMEGA, GroupElement, Point, hom_eval
from .oracle import FiniteValuedSequence, OracleState, p_limit
from .periodic import PeriodicSet


class SimPoint(dict):
    """A point of ``Z_2^coords`` as ``{coordinate: bit}``; ``+`` is XOR."""

    def __add__(self, other: "SimPoint") -> "SimPoint":
        return SimPoint({b: self[b] ^ other[b] for b in self})

    def bits(self, coords) -> list:
        return [self[b] for b in coords]


@dataclass
class OpenBox:
    """A basic open set: finitely many coordinates pinned, the rest free."""

    constraints: dict = field(default_factory=dict)

    def __contains__(self, point: SimPoint) -> bool:
        return all(point[b] == v for b, v in self.constraints.items())

    @property
    def support(self) -> frozenset:
        return frozenset(self.constraints)

    def to_json(self) -> dict:
        return {str(b): v for b, v in sorted(self.constraints.items())}

    @classmethod
    def from_json(cls, data: dict) -> "OpenBox":
        out = {}
        for b, v in data.items():
            if v not in (0, 1):
                raise ValueError(f"box value for {b!r} must be 0 or 1")
            out[str(b)] = int(v)
        return cls(out)


@dataclass
class SimConfig:
    oracles: dict
    generators: list
    coords: list
    index_sets: dict = field(default_factory=dict)
    targets: dict = field(default_factory=dict)  # (p, alpha) -> {beta: ones}
    coord_maps: dict = field(default_factory=dict)  # beta -> CoherentMap
    generator_capacity: Optional[int] = None
    coord_capacity: Optional[int] = None

    def check(self) -> None:
        """Validate the config; coherence of ``f_beta`` is asked of the oracles."""
        coords = set(self.coords)
        if len(coords) != len(self.coords) or len(set(self.generators)) != len(self.generators):
            raise PreconditionError("duplicate coordinate or generator id")
        for alpha, block in self.index_sets.items():
            if alpha not in self.generators:
                raise PreconditionError(f"index set for unknown generator {alpha!r}")
            if not block <= coords:
                raise PreconditionError(f"I_{alpha} is not a subset of coords")
        for (p, alpha), cols in self.targets.items():
            if not set(cols) <= self.index_sets.get(alpha, frozenset()):
                raise PreconditionError(f"target ({p}, {alpha}) outside I_{alpha}")
        for beta, fmap in self.coord_maps.items():
            if beta not in coords:
                raise PreconditionError(f"map for unknown coordinate {beta!r}")
            for col in fmap.columns.values():
                state = self.oracle(col.owner[0])
                if state.query(col.agreement()) != 1:
                    raise PreconditionError(f"f_{beta} is not coherent at {col.owner}")

    def oracle(self, p: str) -> OracleState:
        state = self.oracles.get(p)
        if state is None:
            state = self.oracles[p] = OracleState(p)
        return state

    def block(self, alpha) -> frozenset:
        if alpha not in self.index_sets and alpha not in self.generators:
            raise PreconditionError(f"unknown generator {alpha!r}")
        return self.index_sets.get(alpha, frozenset())

    def to_json(self) -> dict:
        return {
            "ultrafilters": [self.oracles[p].snapshot() for p in sorted(self.oracles)],
            "generators": list(self.generators),
            "coords": list(self.coords),
            "index_sets": {a: sorted(self.index_sets[a]) for a in self.generators
                           if a in self.index_sets},
            "targets": [
                {"p": p, "alpha": a, "ones": {b: s.to_json() for b, s in sorted(cols.items())}}
                for (p, a), cols in sorted(self.targets.items())
            ],
            "coord_maps": {b: self.coord_maps[b].to_json() for b in self.coords
                           if b in self.coord_maps},
            "generator_capacity": self.generator_capacity,
            "coord_capacity": self.coord_capacity,
        }

    @classmethod
    def from_json(cls, data: dict, check: bool = True) -> "SimConfig":
        oracles = {}
        for snap in data.get("ultrafilters", []):
            state = OracleState.from_snapshot(snap)
            oracles[state.id] = state
        cfg = cls(
            oracles=oracles,
            generators=[str(a) for a in data["generators"]],
            coords=[str(b) for b in data["coords"]],
            index_sets={str(a): frozenset(str(b) for b in bs)
                        for a, bs in data.get("index_sets", {}).items()},
            targets={(str(t["p"]), str(t["alpha"])):
                     {str(b): PeriodicSet.from_json(s) for b, s in t["ones"].items()}
                     for t in data.get("targets", [])},
            coord_maps={str(b): CoherentMap.from_json(m)
                        for b, m in data.get("coord_maps", {}).items()},
            generator_capacity=data.get("generator_capacity"),
            coord_capacity=data.get("coord_capacity"),
        )
        if check:
            cfg.check()
        return cfg


def _limit_bit(state: OracleState, ones: PeriodicSet, readonly: bool) -> int:
    if not readonly:
        return p_limit(state, FiniteValuedSequence.two_valued(ones))
    if state.decided(ones) == 1:
        return 1
    if state.decided(ones.complement()) == 1:
        return 0
    _fail("oracle-replay", f"p-limit of {ones!r} was never decided by {state.id!r}")


def build_point(cfg: SimConfig, p: str, alpha: str, n, readonly: bool = False) -> SimPoint:
    """``z(p, alpha, n)``, with ``n`` a natural number or OMEGA."""
    block = cfg.block(alpha)
    cols = cfg.targets.get((p, alpha))
    if block and cols is None:
        raise MissingTarget(f"no target sequence for ({p}, {alpha})")
    x = Point(p, alpha, n)
    out = SimPoint()
    for beta in cfg.coords:
        if beta in block:
            ones = cols.get(beta)
            if ones is None:
                raise MissingTarget(f"no target for ({p}, {alpha}) at coordinate {beta!r}")
            if n is OMEGA:
                out[beta] = _limit_bit(cfg.oracle(p), ones, readonly)
            else:
                out[beta] = int(ones.member(n))
        else:
            fmap = cfg.coord_maps.get(beta)
            out[beta] = 0 if fmap is None else fmap.value(x)
    return out


def element_point(cfg: SimConfig, E: GroupElement, readonly: bool = False) -> SimPoint:
    """The sum of ``z`` over the points of ``E``."""
    total = SimPoint({b: 0 for b in cfg.coords})
    for x in E.points:
        total = total + build_point(cfg, x.p, x.k, x.n, readonly)
    return total


def _fresh_id(prefix: str, taken) -> str:
    i = len(taken)
    while f"{prefix}{i}" in taken:
        i += 1
    return f"{prefix}{i}"


def witness_selective(cfg: SimConfig, p: str, boxes: Sequence[OpenBox]) -> dict:
    """Points in ``boxes`` with a common ``p``-limit, as a certificate body.

    The finite box list is read cyclically, ``U_n = boxes[n % len(boxes)]``,
    so every target is purely periodic with period ``len(boxes)``.
    """
    boxes = list(boxes)
    if not boxes:
        raise PreconditionError("at least one box is required")
    coords = set(cfg.coords)
    for box in boxes:
        if not box.support <= coords:
            raise PreconditionError(f"box constrains unknown coordinates {sorted(box.support - coords)}")
    start_cfg = cfg.to_json()
    rec = _Recorder(cfg.oracles)
    cfg.oracle(p)

    J = frozenset().union(*(box.support for box in boxes))
    hosts = [a for a in cfg.generators if J <= cfg.index_sets.get(a, frozenset())]
    if hosts:
        I = min((cfg.block(a) for a in hosts), key=len)
    else:
        I = J
    N = len(boxes)
    # least point of V_n: pinned coordinates as required, free ones 0
    target = {b: PeriodicSet(0, N, [n for n, box in enumerate(boxes) if box.constraints.get(b, 0)])
              for b in I}

    alpha = next((a for a in cfg.generators
                  if cfg.block(a) == I and cfg.targets.get((p, a), {}) == target),
                 None)
    allocated = alpha is None
    if allocated:
        if cfg.generator_capacity is not None and len(cfg.generators) >= cfg.generator_capacity:
            raise ConfigExhausted("no room for a fresh generator block")
        alpha = _fresh_id("a", set(cfg.generators))
        cfg.generators.append(alpha)
        cfg.index_sets[alpha] = I
        for q in cfg.oracles:
            cfg.targets[(q, alpha)] = dict(target)

    points = [build_point(cfg, p, alpha, n) for n in range(N)]
    for n, (x, box) in enumerate(zip(points, boxes)):
        if x not in box:
            raise PreconditionError(f"chosen point {n} misses its box")
    limit = build_point(cfg, p, alpha, OMEGA)
    coordinates = []
    for beta in cfg.coords:
        if beta in I:
            coordinates.append({"beta": beta, "case": 1, "ones": target[beta].to_json(),
                                "limit": limit[beta]})
        else:
            fmap = cfg.coord_maps.get(beta)
            col = None if fmap is None else fmap.columns.get((p, alpha))
            agreement = PeriodicSet.naturals() if col is None else col.agreement()
            if cfg.oracle(p).query(agreement) != 1:
                raise PreconditionError(f"f_{beta} is not coherent at ({p}, {alpha})")
            coordinates.append({"beta": beta, "case": 2,
                                "column": None if col is None else col.to_json(),
                                "limit": limit[beta]})

    config = cfg.to_json()
    config["ultrafilters"] = start_cfg["ultrafilters"]
    return {
        "kind": "selective",
        "p": p,
        "alpha": alpha,
        "allocated": allocated,
        "J": sorted(J),
        "I": sorted(I),
        "boxes": [box.to_json() for box in boxes],
        "points": [x.bits(cfg.coords) for x in points],
        "limit": limit.bits(cfg.coords),
        "coordinates": coordinates,
        "config": config,
        "oracles": rec.export(),
    }


def witness_no_convergence(cfg: SimConfig, family: Sequence, star_mode: str = AUTO,
                           schedule_length: Optional[int] = None) -> dict:
    """Refute convergence of ``g_m = sum of z over E_m`` at a fresh coordinate.

    ``family`` holds ``(g_m, E_m)`` pairs; ``g_m`` may be None, in which
    case it is computed from ``E_m``.
    """
    family = list(family)
    Es = [E for _, E in family]
    if len(set(Es)) != len(Es):
        raise NotFaithfullyIndexed("the family repeats an E_m")
    if not Es:
        raise PreconditionError("empty family")
    start_cfg = cfg.to_json()
    rec = _Recorder(cfg.oracles)

    gs = []
    for m, (g, E) in enumerate(family):
        computed = element_point(cfg, E)
        if g is not None and dict(g) != dict(computed):
            raise InconsistentFamily(f"g_{m} is not the sum of z over E_{m}")
        gs.append(computed)

    J = sorted({x.k for E in Es for x in E.points})
    I = sorted(frozenset().union(*(cfg.block(a) for a in J)))

    if cfg.coord_capacity is not None and len(cfg.coords) >= cfg.coord_capacity:
        raise ConfigExhausted("no room for a fresh coordinate")
    beta = _fresh_id("b", set(cfg.coords))
    split = coherent_split(Es, len(Es), star_mode, cfg.oracles, schedule_length)
    cfg.coords.append(beta)
    cfg.coord_maps[beta] = split.map

    g_beta = []
    for m, E in enumerate(Es):
        via_points = 0
        for x in E.points:
            via_points ^= build_point(cfg, x.p, x.k, x.n)[beta]
        via_map = hom_eval(split.map, E)
        if via_points != via_map:
            raise InconsistentFamily(f"g_{m}(beta) differs from the split map at E_{m}")
        g_beta.append(via_points)

    classes = [[m for m, v in enumerate(g_beta) if v == i] for i in (0, 1)]
    s = _steered(split.stats, split.path)
    config = copy.deepcopy(start_cfg)
    return {
        "kind": "refute",
        "beta": beta,
        "J": J,
        "I": I,
        "family": [E.to_json() for E in Es],
        "g": [g.bits(start_cfg["coords"]) for g in gs],
        "g_beta": g_beta,
        "classes": classes,
        "s": s,
        "min_class": min(len(c) for c in classes),
        "sufficient": all(classes) and min(len(c) for c in classes) >= s // 2,
        "split": split.to_json(),
        "config": config,
        "oracles": rec.export(),
    }


def _steered(stats: dict, path: str) -> int:
    if path == "finite":
        return stats["steered"]
    return 2 * min(stats["hits"])


# -- verification -------------------------------------------------------------


def _config_with_replay(cert: dict):
    cfg = SimConfig.from_json(cert["config"], check=False)
    states = replay_oracles(cert["oracles"])
    for p, snap in ((s["id"], s) for s in cert["config"]["ultrafilters"]):
        if p in states:
            if cert["oracles"][p]["snapshot"] != snap:
                _fail("oracle-replay", f"config snapshot of {p!r} differs from the transcript's")
        else:
            states[p] = OracleState.from_snapshot(snap)
    cfg.oracles = states
    return cfg


def verify_selective(cert: dict) -> dict:
    cfg = _config_with_replay(cert)
    p, alpha = cert["p"], cert["alpha"]
    boxes = [OpenBox.from_json(b) for b in cert["boxes"]]
    I = frozenset(cert["I"])
    J = frozenset().union(*(b.support for b in boxes))
    if sorted(J) != cert["J"] or not J <= I:
        _fail("support", "J must be the union of supports and lie in I")
    if cfg.block(alpha) != I:
        _fail("support", f"I_{alpha} differs from I")
    for beta in cfg.coord_maps:
        for col in cfg.coord_maps[beta].columns.values():
            check_column_coherent(col, cfg.oracles, "config-coherence")
    N = len(boxes)
    for n, (bits, box) in enumerate(zip(cert["points"], boxes)):
        x = build_point(cfg, p, alpha, n, readonly=True)
        if x.bits(cfg.coords) != bits:
            _fail("point", f"x_{n} is not z({p}, {alpha}, {n})")
        if x not in box:
            _fail("box-membership", f"x_{n} misses its box")
    if len(cert["points"]) != N:
        _fail("point", "one point per box required")
    limit = build_point(cfg, p, alpha, OMEGA, readonly=True)
    if limit.bits(cfg.coords) != cert["limit"]:
        _fail("limit", "limit point is not z(p, alpha, omega)")
    state = cfg.oracles[p]
    if [c["beta"] for c in cert["coordinates"]] != cfg.coords:
        _fail("limit-certificate", "one certificate per coordinate required")
    for c in cert["coordinates"]:
        beta = c["beta"]
        if c["limit"] != limit[beta]:
            _fail("limit-certificate", f"coordinate {beta}")
        if c["case"] == 1:
            if beta not in I:
                _fail("limit-certificate", f"{beta} is not in I")
            ones = PeriodicSet.from_json(c["ones"])
            if ones != cfg.targets[(p, alpha)][beta]:
                _fail("limit-certificate", f"target of {beta}")
            cell = ones if c["limit"] == 1 else ones.complement()
            if state.decided(cell) != 1:
                _fail("case1-p-limit", f"coordinate {beta}")
            # every x_n agrees with the target, so the same cell works for z
        elif c["case"] == 2:
            if beta in I:
                _fail("limit-certificate", f"{beta} lies in I")
            fmap = cfg.coord_maps.get(beta)
            col = None if fmap is None else fmap.columns.get((p, alpha))
            if (None if col is None else col.to_json()) != c["column"]:
                _fail("case2-coherence", f"column of f_{beta}")
            if col is not None:
                check_column_coherent(col, cfg.oracles, "case2-coherence")
        else:
            _fail("limit-certificate", f"unknown case {c['case']!r}")
    return {"kind": "selective", "boxes": N, "coords": len(cfg.coords)}


def verify_refute(cert: dict) -> dict:
    verify_split(cert["split"])
    cfg = _config_with_replay(cert)
    for fmap in cfg.coord_maps.values():
        for col in fmap.columns.values():
            check_column_coherent(col, cfg.oracles, "config-coherence")
    Es = [GroupElement.from_json(E) for E in cert["family"]]
    if len(set(Es)) != len(Es):
        _fail("faithful", "family repeats an element")
    beta = cert["beta"]
    if beta in cfg.coords:
        _fail("fresh-coordinate", f"{beta!r} already exists")
    J = sorted({x.k for E in Es for x in E.points})
    I = sorted(frozenset().union(*(cfg.block(a) for a in J)))
    if J != cert["J"] or I != cert["I"]:
        _fail("support", "J or I recomputed differently")
    for m, E in enumerate(Es):
        if element_point(cfg, E, readonly=True).bits(cfg.coords) != cert["g"][m]:
            _fail("g-sum", f"g_{m} is not the sum of z over E_{m}")
    fmap = CoherentMap.from_json(cert["split"]["map"])
    if [a for a in cert["split"]["elements"]] != cert["family"]:
        _fail("split-family", "the split certificate covers a different family")
    cfg.coords.append(beta)
    cfg.coord_maps[beta] = fmap
    for m, E in enumerate(Es):
        via_points = 0
        for x in E.points:
            via_points ^= build_point(cfg, x.p, x.k, x.n, readonly=True)[beta]
        if via_points != cert["g_beta"][m] or hom_eval(fmap, E) != cert["g_beta"][m]:
            _fail("equality-chain", f"g_{m}(beta) != f_beta(E_{m})")
    classes = [[m for m, v in enumerate(cert["g_beta"]) if v == i] for i in (0, 1)]
    if classes != cert["classes"]:
        _fail("classes")
    split = cert["split"]
    s = _steered(split["stats"], split["path"])
    if s != cert["s"] or min(len(c) for c in classes) != cert["min_class"]:
        _fail("stats")
    if cert["sufficient"] != (all(classes) and cert["min_class"] >= s // 2):
        _fail("stats", "sufficient flag")
    return {"kind": "refute", "family": len(Es), "class_sizes": [len(c) for c in classes]}


register("selective", verify_selective)
register("refute", verify_refute)
