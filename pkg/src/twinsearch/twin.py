"""TwinSearch: build a new user's similarity list by copying a twin's list.

A twin is an existing user with exactly the same (item, rating) pairs. Twins
have identical similarity to every third user, so for any anchor user the
twin sits in the anchor's list at the similarity the new user has with that
anchor. Probing a few random anchors and intersecting the equal-similarity
blocks leaves a small candidate set; the first candidate whose ratings match
exactly is the twin, and its list is reused instead of recomputing n-1
similarities.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, fields
from typing import Iterable, Sequence

from .ratings import RatingMatrix
from .similarity import (
    DEFAULT_TOLERANCE,
    SimilarityList,
    SimilarityStore,
    StoreError,
    build_list_full,
    cosine,
)

DEFAULT_C = 3


@dataclass
class TwinSearchConfig:
    c: int = DEFAULT_C
    seed: int = 0
    tolerance: float = DEFAULT_TOLERANCE

    def __post_init__(self):
        if self.c < 1:
            raise ValueError("c must be a positive integer")


@dataclass
class OpCounters:
    sims: int = 0
    range_searches: int = 0
    set0: int = 0
    verifications: int = 0
    fallback: bool = False

    CSV_HEADER = "phase,sims,range_searches,set0,verifications,fallback"

    def csv_row(self, phase: str) -> str:
        return f"{phase},{self.sims},{self.range_searches},{self.set0},{self.verifications},{int(self.fallback)}"

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass
class TwinResult:
    """Outcome of :func:`twin_search`; ``slist`` is None when no twin was found."""

    slist: SimilarityList | None
    twin: int | None
    counters: OpCounters
    anchors: list[int]
    anchor_sims: dict[int, float]

    @property
    def found(self) -> bool:
        return self.slist is not None


def probe_anchor(
    matrix: RatingMatrix,
    store: SimilarityStore,
    u0: int,
    anchor: int,
    tolerance: float = DEFAULT_TOLERANCE,
    counters: OpCounters | None = None,
) -> tuple[set[int], float]:
    """Candidate set from one anchor, plus the computed sim(u0, anchor)."""
    if anchor == u0:
        raise ValueError("anchor must differ from the new user")
    if anchor not in store:
        raise StoreError(f"anchor {anchor} has no similarity list")
    sim = cosine(matrix, u0, anchor)
    found = store[anchor].equal_range(sim, tolerance)
    if sim >= 1.0 - tolerance:
        found.add(anchor)
    if counters is not None:
        counters.sims += 1
        counters.range_searches += 1
    return found, sim


def intersect(sets: Sequence[set[int]]) -> set[int]:
    """Intersection probing from the smallest set."""
    if not sets:
        raise ValueError("need at least one set")
    ordered = sorted(sets, key=len)
    base, rest = ordered[0], ordered[1:]
    return {x for x in base if all(x in s for s in rest)}


def verify_twin(matrix: RatingMatrix, u0: int, candidate: int) -> bool:
    return matrix.row_equal(u0, candidate)


def copy_list(store: SimilarityStore, twin: int, u0: int) -> SimilarityList:
    """u0's list: the twin's list with the twin itself added at similarity 1."""
    if u0 in store:
        raise StoreError(f"user {u0} already has a list")
    slist = store[twin].copy(owner=u0)
    slist.remove(u0)
    slist.insert(twin, 1.0)
    return slist


def candidate_set(
    matrix: RatingMatrix,
    store: SimilarityStore,
    u0: int,
    anchors: Iterable[int],
    tolerance: float = DEFAULT_TOLERANCE,
    counters: OpCounters | None = None,
) -> tuple[set[int], dict[int, float]]:
    """Set_0 for a fixed anchor sequence, with the anchor similarities."""
    sets, anchor_sims = [], {}
    for a in anchors:
        found, sim = probe_anchor(matrix, store, u0, a, tolerance, counters)
        sets.append(found)
        anchor_sims[a] = sim
    return intersect(sets), anchor_sims


def sample_anchors(store: SimilarityStore, u0: int, c: int, seed: int) -> list[int]:
    pool = sorted(u for u in store.lists if u != u0)
    if c > len(pool):
        raise ValueError(f"c={c} exceeds the {len(pool)} users available as anchors")
    rng = random.Random(seed * 1_000_003 + u0)
    return rng.sample(pool, c)


def twin_search(
    matrix: RatingMatrix,
    store: SimilarityStore,
    u0: int,
    config: TwinSearchConfig | None = None,
) -> TwinResult:
    """Look for a twin of ``u0`` and return a copy of its list if one exists.

    ``u0`` must already be a row of ``matrix`` but not yet have a list. The
    store is not modified.
    """
    config = config or TwinSearchConfig()
    counters = OpCounters()
    anchors = sample_anchors(store, u0, config.c, config.seed)
    set0, anchor_sims = candidate_set(matrix, store, u0, anchors, config.tolerance, counters)
    counters.set0 = len(set0)
    for cand in sorted(set0):
        counters.verifications += 1
        if verify_twin(matrix, u0, cand):
            return TwinResult(copy_list(store, cand, u0), cand, counters, anchors, anchor_sims)
    return TwinResult(None, None, counters, anchors, anchor_sims)


def add_user_fast(
    matrix: RatingMatrix,
    store: SimilarityStore,
    ratings: Iterable[tuple[int, int]],
    config: TwinSearchConfig | None = None,
) -> tuple[int, OpCounters]:
    """Add a user, building its list via TwinSearch or the full fallback.

    Either way the new user is then inserted into every existing list so
    that later twins can be found through it.
    """
    config = config or TwinSearchConfig()
    u0 = matrix.add_user(ratings)
    if len(store) == 0:
        counters = OpCounters(fallback=True)
        slist = build_list_full(matrix, u0, counters)
    else:
        c = min(config.c, len(store))
        result = twin_search(matrix, store, u0, TwinSearchConfig(c, config.seed, config.tolerance))
        counters = result.counters
        slist = result.slist
        if slist is None:
            counters.fallback = True
            # anchor sims are already known; only the rest are computed
            slist = build_list_full(matrix, u0, counters, known=result.anchor_sims)
    store.add_list(slist)
    store.insert_symmetric(slist)
    return u0, counters


def add_user_slow(
    matrix: RatingMatrix, store: SimilarityStore, ratings: Iterable[tuple[int, int]]
) -> tuple[int, OpCounters]:
    """Baseline: full build for the new user plus the same symmetric insertion."""
    u0 = matrix.add_user(ratings)
    counters = OpCounters()
    slist = build_list_full(matrix, u0, counters)
    store.add_list(slist)
    store.insert_symmetric(slist)
    return u0, counters
