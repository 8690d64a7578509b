"""Reproducible streams of pairwise distinct group elements for experiments."""

from __future__ import annotations

import random
from typing import List

from .group import OMEGA, GroupElement, Point

KINDS = ("star-free", "star-rich", "mixed", "bucketed")


def point_pool(n_ultrafilters: int = 4, n_generators: int = 25, depth: int = 10) -> list:
    """``n_ultrafilters * n_generators * depth`` points with finite index."""
    return [Point(f"p{i}", f"k{j}", n)
            for i in range(n_ultrafilters) for j in range(n_generators) for n in range(depth)]


def star_pool(n_ultrafilters: int = 4, n_generators: int = 25) -> list:
    return [Point(f"p{i}", f"k{j}", OMEGA)
            for i in range(n_ultrafilters) for j in range(n_generators)]


def _distinct(rng, size, make) -> list:
    out, seen = [], set()
    attempts = 0
    while len(out) < size:
        a = make(len(out))
        attempts += 1
        if attempts > 100 * size + 1000:
            raise ValueError("point pool too small for that many distinct elements")
        if a and a not in seen:
            seen.add(a)
            out.append(a)
    return out


def generate_stream(kind: str, size: int, seed: int = 0, *, n_ultrafilters: int = 4,
                    n_generators: int = 25, depth: int = 10, max_points: int = 4,
                    n_buckets: int = 3, dominant: float = 0.7) -> List[GroupElement]:
    """Generate ``size`` distinct elements of the given profile.

    star-free
        subsets of the finite-index pool.
    star-rich
        every element carries its own fresh omega-point ``(p, s<m>, omega)``
        plus up to ``max_points - 1`` pool points.
    mixed
        subsets of the pool extended by all omega-points over the same ids.
    bucketed
        ``n_buckets`` fixed star traces, the first holding a ``dominant``
        share of the stream, each completed by a nonempty pool subset.
    """
    if size < 1:
        raise ValueError("size must be >= 1")
    if kind not in KINDS:
        raise ValueError(f"unknown stream kind {kind!r}; expected one of {KINDS}")
    rng = random.Random(f"{kind}:{seed}")
    base = point_pool(n_ultrafilters, n_generators, depth)
    stars = star_pool(n_ultrafilters, n_generators)

    def subset(pool, lo, hi):
        return rng.sample(pool, rng.randint(lo, hi))

    if kind == "star-free":
        return _distinct(rng, size, lambda m: GroupElement(subset(base, 1, max_points)))
    if kind == "star-rich":
        def make(m):
            fresh = Point(f"p{rng.randrange(n_ultrafilters)}", f"s{m}", OMEGA)
            return GroupElement([fresh] + subset(base, 0, max_points - 1))
        return _distinct(rng, size, make)
    if kind == "mixed":
        pool = base + stars
        return _distinct(rng, size, lambda m: GroupElement(subset(pool, 1, max_points)))

    traces = []
    while len(traces) < n_buckets:
        t = frozenset(subset(stars, 1, 2))
        if t not in traces:
            traces.append(t)
    n_dom = round(dominant * size)
    labels = [0] * n_dom + [1 + (i % (n_buckets - 1)) for i in range(size - n_dom)] \
        if n_buckets > 1 else [0] * size
    rng.shuffle(labels)
    return _distinct(rng, size,
                     lambda m: GroupElement(traces[labels[m]] | set(subset(base, 1, max_points))))
