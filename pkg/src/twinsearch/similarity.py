"""Cosine similarity and per-user sorted similarity lists.

Every similarity is computed as ``dot / sqrt(norm2_a * norm2_b)`` where the
dot product and both squared norms are exact integers. The only rounding
steps are the int->float conversion, one sqrt and one division, all
correctly rounded, so the value is bit-identical whatever the argument order
and whichever code path (scalar merge or the vectorised bootstrap) produced
it. Twin users therefore get exactly equal similarities, and exactly 1.0
against each other.
"""

from __future__ import annotations

import bisect
import math
import sys
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, TextIO

import numpy as np
import scipy.sparse as sp

from .ratings import RatingMatrix

DEFAULT_TOLERANCE = 1e-9


class ZeroNormError(ValueError):
    pass


class StoreError(KeyError):
    pass


class SimilarityEntry(NamedTuple):
    other: int
    sim: float


def cosine(matrix: RatingMatrix, a: int, b: int) -> float:
    """Cosine of two rating rows, merging the sorted item lists."""
    na, nb = matrix.norm2[a], matrix.norm2[b]
    if na == 0 or nb == 0:
        raise ZeroNormError(f"user {a if na == 0 else b} has no ratings")
    ia, ra = matrix.items[a], matrix.ratings[a]
    ib, rb = matrix.items[b], matrix.ratings[b]
    la, lb = len(ia), len(ib)
    i = j = dot = 0
    while i < la and j < lb:
        x, y = ia[i], ib[j]
        if x == y:
            dot += ra[i] * rb[j]
            i += 1
            j += 1
        elif x < y:
            i += 1
        else:
            j += 1
    return dot / math.sqrt(na * nb)


class SimilarityList:
    """One user's neighbours ordered by similarity desc, then id asc.

    Entries are held as ``(-sim, other)`` tuples so plain tuple ordering is
    the list order and ``bisect`` works directly on it.
    """

    __slots__ = ("owner", "_keys")

    def __init__(self, owner: int, keys: list[tuple[float, int]] | None = None):
        self.owner = owner
        self._keys = keys if keys is not None else []

    @classmethod
    def from_entries(cls, owner: int, entries) -> SimilarityList:
        keys = sorted((-float(s), int(o)) for o, s in entries)
        return cls(owner, keys)

    def __len__(self) -> int:
        return len(self._keys)

    def __iter__(self) -> Iterator[SimilarityEntry]:
        for neg, other in self._keys:
            yield SimilarityEntry(other, -neg + 0.0)

    def __getitem__(self, idx: int) -> SimilarityEntry:
        neg, other = self._keys[idx]
        return SimilarityEntry(other, -neg + 0.0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SimilarityList):
            return NotImplemented
        return self.owner == other.owner and self._keys == other._keys

    def __repr__(self) -> str:
        head = ", ".join(f"({e.other}, {e.sim:.4g})" for e in list(self)[:4])
        more = ", ..." if len(self) > 4 else ""
        return f"SimilarityList(owner={self.owner}, [{head}{more}])"

    def others(self) -> list[int]:
        return [o for _, o in self._keys]

    def sims(self) -> list[float]:
        return [-neg + 0.0 for neg, _ in self._keys]

    def copy(self, owner: int | None = None) -> SimilarityList:
        return SimilarityList(self.owner if owner is None else owner, list(self._keys))

    def insert(self, other: int, sim: float) -> None:
        bisect.insort(self._keys, (-sim, other))

    def remove(self, other: int) -> bool:
        for idx, (_, o) in enumerate(self._keys):
            if o == other:
                del self._keys[idx]
                return True
        return False

    def equal_range(self, target: float, tolerance: float = DEFAULT_TOLERANCE) -> set[int]:
        """Ids whose similarity satisfies ``|sim - target| <= tolerance``.

        Two binary searches find the block boundaries; cost is
        O(log n + size of the result).
        """
        keys = self._keys

        def hit(idx):
            return abs(-keys[idx][0] - target) <= tolerance

        lo = bisect.bisect_left(keys, (-(target + tolerance), -1))
        hi = bisect.bisect_right(keys, (-(target - tolerance), sys.maxsize), lo)
        # target +- tolerance rounds differently from the |sim - target|
        # predicate; nudge each end so the block matches it exactly
        while lo > 0 and hit(lo - 1):
            lo -= 1
        while lo < hi and not hit(lo):
            lo += 1
        while hi < len(keys) and hit(hi):
            hi += 1
        while hi > lo and not hit(hi - 1):
            hi -= 1
        return {o for _, o in keys[lo:hi]}


@dataclass
class SimilarityStore:
    lists: dict[int, SimilarityList] = field(default_factory=dict)
    tolerance: float = DEFAULT_TOLERANCE

    def __contains__(self, u: int) -> bool:
        return u in self.lists

    def __getitem__(self, u: int) -> SimilarityList:
        try:
            return self.lists[u]
        except KeyError:
            raise StoreError(f"user {u} has no similarity list") from None

    def __len__(self) -> int:
        return len(self.lists)

    def copy(self) -> SimilarityStore:
        return SimilarityStore({u: s.copy() for u, s in self.lists.items()}, self.tolerance)

    def add_list(self, slist: SimilarityList) -> None:
        if slist.owner in self.lists:
            raise StoreError(f"user {slist.owner} already has a list")
        self.lists[slist.owner] = slist

    def insert_entry(self, owner: int, other: int, sim: float) -> None:
        """Insert one neighbour into ``owner``'s list at its sorted position."""
        slist = self.lists.setdefault(owner, SimilarityList(owner))
        if other == owner:
            raise StoreError("a user cannot be its own neighbour")
        # a duplicate id would sit at the position of its own (-sim, id) key
        # only if sims match, so check membership explicitly
        if any(o == other for _, o in slist._keys):
            raise StoreError(f"user {other} already in list of {owner}")
        slist.insert(other, sim)

    def insert_symmetric(self, slist: SimilarityList) -> None:
        """Mirror every entry of a new user's list into its neighbours' lists."""
        u = slist.owner
        for neg, other in slist._keys:
            bisect.insort(self[other]._keys, (neg, u))

    def remove_user(self, u: int) -> None:
        """Drop ``u``'s list and every entry pointing at ``u``."""
        slist = self.lists.pop(u)
        for neg, other in slist._keys:
            keys = self[other]._keys
            idx = bisect.bisect_left(keys, (neg, u))
            if idx == len(keys) or keys[idx] != (neg, u):
                raise StoreError(f"user {u} missing from list of {other}")
            del keys[idx]

    def same_as(self, other: SimilarityStore, tolerance: float = DEFAULT_TOLERANCE) -> bool:
        if self.lists.keys() != other.lists.keys():
            return False
        for u, mine in self.lists.items():
            theirs = other.lists[u]
            if mine._keys == theirs._keys:
                continue
            if mine.others() != theirs.others():
                return False
            if any(abs(a - b) > tolerance for a, b in zip(mine.sims(), theirs.sims())):
                return False
        return True

    def audit(self) -> list[str]:
        """Return a list of invariant violations (empty when consistent)."""
        problems = []
        users = set(self.lists)
        sim_of: dict[tuple[int, int], float] = {}
        for u, slist in self.lists.items():
            if slist._keys != sorted(slist._keys):
                problems.append(f"list {u} not sorted")
            ids = slist.others()
            if u in ids:
                problems.append(f"list {u} contains its owner")
            if len(ids) != len(set(ids)) or set(ids) != users - {u}:
                problems.append(f"list {u} does not cover every other user exactly once")
            for e in slist:
                if not 0.0 <= e.sim <= 1.0:
                    problems.append(f"sim({u},{e.other}) = {e.sim} outside [0, 1]")
                sim_of[(u, e.other)] = e.sim
        for (a, b), s in sim_of.items():
            if a < b and sim_of.get((b, a)) != s:
                problems.append(f"asymmetric sim between {a} and {b}")
        return problems

    def to_csv(self, stream: TextIO) -> None:
        stream.write("owner,other,sim\n")
        for u in sorted(self.lists):
            for e in self.lists[u]:
                stream.write(f"{u},{e.other},{e.sim:.17g}\n")


def build_list_full(matrix: RatingMatrix, u: int, counters=None, known: dict[int, float] | None = None) -> SimilarityList:
    """Traditional O(mn) list build: cosine against every other user, then sort.

    ``known`` supplies similarities already computed by the caller (e.g. the
    anchor probes of a failed twin search); they are reused rather than
    recomputed. ``counters.sims`` is increased by the number of cosines run.
    """
    known = known or {}
    keys = []
    computed = 0
    for v in range(matrix.n):
        if v == u:
            continue
        s = known.get(v)
        if s is None:
            s = cosine(matrix, u, v)
            computed += 1
        keys.append((-s, v))
    keys.sort()
    if counters is not None:
        counters.sims += computed
    return SimilarityList(u, keys)


def similarity_block(matrix: RatingMatrix, rows: range, csr: sp.csr_matrix | None = None) -> np.ndarray:
    """Dense cosine block for ``rows`` against all users, same bits as :func:`cosine`."""
    if csr is None:
        csr = to_csr(matrix)
    norm2 = np.asarray(matrix.norm2, dtype=np.int64)
    if np.any(norm2 == 0):
        raise ZeroNormError("matrix contains a user with no ratings")
    dots = (csr[rows.start:rows.stop] @ csr.T).toarray()
    denom = np.sqrt((norm2[rows.start:rows.stop, None] * norm2[None, :]).astype(np.float64))
    return dots.astype(np.float64) / denom


def to_csr(matrix: RatingMatrix) -> sp.csr_matrix:
    indptr = np.zeros(matrix.n + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(r) for r in matrix.items])
    indices = np.fromiter((i for row in matrix.items for i in row), dtype=np.int64, count=int(indptr[-1]))
    data = np.fromiter((r for row in matrix.ratings for r in row), dtype=np.int64, count=int(indptr[-1]))
    return sp.csr_matrix((data, indices, indptr), shape=(matrix.n, matrix.m))


def build_all(matrix: RatingMatrix, tolerance: float = DEFAULT_TOLERANCE, block_size: int = 512) -> SimilarityStore:
    """Bootstrap the full store with a blocked sparse product.

    Each block of rows is independent of the others, so the result does not
    depend on ``block_size``.
    """
    n = matrix.n
    if n < 2:
        raise ValueError("need at least two users to build similarity lists")
    csr = to_csr(matrix)
    ids = np.arange(n)
    store = SimilarityStore(tolerance=tolerance)
    for start in range(0, n, block_size):
        rows = range(start, min(n, start + block_size))
        block = similarity_block(matrix, rows, csr)
        for off, u in enumerate(rows):
            sims = block[off]
            order = np.lexsort((ids, -sims))
            order = order[order != u]
            neg = (-sims[order]).tolist()
            store.lists[u] = SimilarityList(u, list(zip(neg, order.tolist())))
    return store
