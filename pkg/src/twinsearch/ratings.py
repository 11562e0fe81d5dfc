"""Sparse user-item rating storage, parsers and the synthetic generator.

Rows are kept as parallel tuples of item indices and integer ratings so that
twin detection can compare ratings exactly. External ids (as found in the
input files) are mapped to dense 0-based indices, assigned in ascending
external-id order so that serialising and re-parsing is lossless.
"""

from __future__ import annotations

import io
import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

MIN_RATING = 1
MAX_RATING = 5


class DatasetError(ValueError):
    """Malformed or inconsistent rating input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class DatasetMeta:
    name: str
    n: int
    m: int
    rating_count: int
    source: str  # "movielens" | "csv" | "synthetic"


@dataclass(eq=False)
class RatingMatrix:
    """n x m integer rating matrix, one sorted sparse row per user.

    ``add_user`` (and ``pop_user``, its undo) are the only mutators; rows are
    tuples, so copies made with :meth:`copy` share them safely.
    """

    m: int
    items: list[tuple[int, ...]] = field(default_factory=list)
    ratings: list[tuple[int, ...]] = field(default_factory=list)
    user_ids: list[int] = field(default_factory=list)
    item_ids: list[int] = field(default_factory=list)
    norm2: list[int] = field(default_factory=list, repr=False)

    def __post_init__(self):
        if len(self.items) != len(self.ratings) or len(self.items) != len(self.user_ids):
            raise DatasetError("rows, ratings and user ids differ in length")
        if not self.item_ids:
            self.item_ids = list(range(1, self.m + 1))
        if len(self.item_ids) != self.m:
            raise DatasetError("item id map must have exactly m entries")
        if not self.norm2:
            self.norm2 = [sum(r * r for r in row) for row in self.ratings]
        self._user_index = {ext: i for i, ext in enumerate(self.user_ids)}
        self._item_index = {ext: j for j, ext in enumerate(self.item_ids)}
        if len(self._user_index) != len(self.user_ids) or len(self._item_index) != self.m:
            raise DatasetError("external ids must be unique")

    @property
    def n(self) -> int:
        return len(self.items)

    @property
    def rating_count(self) -> int:
        return sum(len(row) for row in self.items)

    def __eq__(self, other):
        if not isinstance(other, RatingMatrix):
            return NotImplemented
        return (
            self.m == other.m
            and self.items == other.items
            and self.ratings == other.ratings
            and self.user_ids == other.user_ids
            and self.item_ids == other.item_ids
        )

    def row(self, u: int) -> list[tuple[int, int]]:
        self._check_user(u)
        return list(zip(self.items[u], self.ratings[u]))

    def user_index(self, external_id: int) -> int:
        return self._user_index[external_id]

    def item_index(self, external_id: int) -> int:
        return self._item_index[external_id]

    def copy(self) -> RatingMatrix:
        """Shallow copy; rows are immutable tuples and are shared."""
        return RatingMatrix(
            self.m,
            list(self.items),
            list(self.ratings),
            list(self.user_ids),
            list(self.item_ids),
            list(self.norm2),
        )

    def add_user(self, ratings: Iterable[tuple[int, int]], external_id: int | None = None) -> int:
        """Append a user row and return its dense index."""
        pairs = list(ratings)
        if not pairs:
            raise DatasetError("a new user needs at least one rating")
        prev = -1
        for item, r in pairs:
            if not 0 <= item < self.m:
                raise DatasetError(f"item index {item} out of range [0, {self.m})")
            if item <= prev:
                raise DatasetError("item indices must be strictly increasing")
            _check_rating(r)
            prev = item
        if external_id is None:
            external_id = max(self.user_ids, default=0) + 1
        if external_id in self._user_index:
            raise DatasetError(f"user id {external_id} already present")
        items = tuple(int(i) for i, _ in pairs)
        vals = tuple(int(r) for _, r in pairs)
        u = self.n
        self.items.append(items)
        self.ratings.append(vals)
        self.norm2.append(sum(r * r for r in vals))
        self.user_ids.append(external_id)
        self._user_index[external_id] = u
        return u

    def pop_user(self) -> int:
        """Remove the most recently added user (undo for benchmark repeats)."""
        if not self.items:
            raise IndexError("matrix is empty")
        u = self.n - 1
        self.items.pop()
        self.ratings.pop()
        self.norm2.pop()
        del self._user_index[self.user_ids.pop()]
        return u

    def row_equal(self, a: int, b: int) -> bool:
        """True iff users ``a`` and ``b`` rated the same items identically."""
        self._check_user(a)
        self._check_user(b)
        ia, ib = self.items[a], self.items[b]
        # rows of different length are rejected before any element is compared
        return len(ia) == len(ib) and ia == ib and self.ratings[a] == self.ratings[b]

    def transpose(self) -> RatingMatrix:
        """Item-user view: row i lists the users who rated item i."""
        t_items: list[list[int]] = [[] for _ in range(self.m)]
        t_ratings: list[list[int]] = [[] for _ in range(self.m)]
        for u, (row, vals) in enumerate(zip(self.items, self.ratings)):
            for i, r in zip(row, vals):
                t_items[i].append(u)
                t_ratings[i].append(r)
        return RatingMatrix(
            self.n,
            [tuple(x) for x in t_items],
            [tuple(x) for x in t_ratings],
            list(self.item_ids),
            list(self.user_ids),
        )

    def meta(self, name: str = "", source: str = "csv") -> DatasetMeta:
        return DatasetMeta(name, self.n, self.m, self.rating_count, source)

    def _check_user(self, u: int) -> None:
        if not 0 <= u < self.n:
            raise IndexError(f"user index {u} out of range [0, {self.n})")


def _check_rating(r) -> None:
    if not MIN_RATING <= r <= MAX_RATING:
        raise DatasetError(f"rating {r} outside [{MIN_RATING}, {MAX_RATING}]")


def _from_triples(triples: Sequence[tuple[int, int, int, int]]) -> RatingMatrix:
    """Build a matrix from (user, item, rating, line-number) records."""
    seen: set[tuple[int, int]] = set()
    for user, item, _, lineno in triples:
        if (user, item) in seen:
            raise DatasetError(f"duplicate rating for user {user}, item {item}", lineno)
        seen.add((user, item))
    user_ids = sorted({t[0] for t in triples})
    item_ids = sorted({t[1] for t in triples})
    uidx = {ext: i for i, ext in enumerate(user_ids)}
    iidx = {ext: j for j, ext in enumerate(item_ids)}
    rows: list[list[tuple[int, int]]] = [[] for _ in user_ids]
    for user, item, r, _ in triples:
        rows[uidx[user]].append((iidx[item], r))
    items, ratings = [], []
    for row in rows:
        row.sort()
        items.append(tuple(i for i, _ in row))
        ratings.append(tuple(r for _, r in row))
    return RatingMatrix(len(item_ids), items, ratings, user_ids, item_ids)


def _parse_record(fields: list[str], lineno: int) -> tuple[int, int, int, int]:
    try:
        user, item, r = (int(f) for f in fields[:3])
    except ValueError:
        raise DatasetError(f"non-integer field in {fields[:3]!r}", lineno) from None
    try:
        _check_rating(r)
    except DatasetError as e:
        raise DatasetError(str(e), lineno) from None
    return user, item, r, lineno


def parse_movielens(stream: TextIO, name: str = "movielens") -> tuple[RatingMatrix, DatasetMeta]:
    """Parse MovieLens ``u.data`` (user TAB item TAB rating TAB timestamp)."""
    triples = []
    for lineno, line in enumerate(stream, 1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) < 4:
            raise DatasetError(f"expected 4 tab-separated fields, got {len(fields)}", lineno)
        triples.append(_parse_record(fields, lineno))
    matrix = _from_triples(triples)
    return matrix, matrix.meta(name, "movielens")


def parse_csv(stream: TextIO, has_header: bool = False, name: str = "csv") -> tuple[RatingMatrix, DatasetMeta]:
    """Parse ``user,item,rating`` lines; extra columns are ignored."""
    triples = []
    for lineno, line in enumerate(stream, 1):
        line = line.strip()
        if lineno == 1 and has_header:
            continue
        if not line:
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) < 3:
            raise DatasetError(f"expected 3 comma-separated fields, got {len(fields)}", lineno)
        triples.append(_parse_record(fields, lineno))
    matrix = _from_triples(triples)
    return matrix, matrix.meta(name, "csv")


def _records(matrix: RatingMatrix) -> list[tuple[int, int, int]]:
    out = []
    for u, (row, vals) in enumerate(zip(matrix.items, matrix.ratings)):
        for i, r in zip(row, vals):
            out.append((matrix.user_ids[u], matrix.item_ids[i], r))
    out.sort()
    return out


def to_csv(matrix: RatingMatrix, header: bool = True) -> str:
    """Canonical CSV sorted by (user, item)."""
    buf = io.StringIO()
    if header:
        buf.write("user,item,rating\n")
    for user, item, r in _records(matrix):
        buf.write(f"{user},{item},{r}\n")
    return buf.getvalue()


def to_movielens(matrix: RatingMatrix) -> str:
    """u.data-style text with a zero timestamp, sorted by (user, item)."""
    return "".join(f"{u}\t{i}\t{r}\t0\n" for u, i, r in _records(matrix))


def generate_synthetic(n: int, m: int, density: float, seed: int) -> RatingMatrix:
    """Random matrix where each user rates round(density*m) distinct items.

    Ratings are uniform over 1..5. External ids are 1-based like MovieLens.
    """
    if not 0 < density <= 1:
        raise DatasetError(f"density {density} outside (0, 1]")
    if n < 1 or m < 1:
        raise DatasetError("n and m must be positive")
    per_user = max(1, math.floor(density * m + 0.5))
    rng = random.Random(seed)
    items, ratings = [], []
    for _ in range(n):
        chosen = sorted(rng.sample(range(m), per_user))
        items.append(tuple(chosen))
        ratings.append(tuple(rng.randint(MIN_RATING, MAX_RATING) for _ in chosen))
    return RatingMatrix(m, items, ratings, list(range(1, n + 1)), list(range(1, m + 1)))


def load(path: str, fmt: str = "movielens") -> tuple[RatingMatrix, DatasetMeta]:
    with open(path, encoding="utf-8") as fh:
        if fmt == "movielens":
            return parse_movielens(fh, name=path)
        if fmt == "csv":
            first = fh.readline()
            fh.seek(0)
            has_header = first.strip().lower().startswith("user")
            return parse_csv(fh, has_header=has_header, name=path)
    raise DatasetError(f"unknown format {fmt!r}")
