import os
import random
from pathlib import Path

import pytest
from hypothesis import strategies as st

from twinsearch.ratings import RatingMatrix

ROOT = Path(__file__).resolve().parents[1]
ML100K = Path(os.environ.get("TWINSEARCH_ML100K", ROOT / "data" / "ml-100k" / "u.data"))

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def ml100k_path():
    if not ML100K.exists():
        pytest.fail(f"MovieLens 100k not found at {ML100K}; run scripts/fetch_movielens.py")
    return ML100K


def matrix_from_rows(rows, m):
    """Build a matrix from lists of (item, rating) pairs."""
    rows = [sorted(r) for r in rows]
    return RatingMatrix(
        m,
        [tuple(i for i, _ in r) for r in rows],
        [tuple(v for _, v in r) for r in rows],
        list(range(1, len(rows) + 1)),
        list(range(1, m + 1)),
    )


def random_row(rng: random.Random, m: int, max_len: int | None = None):
    size = rng.randint(1, max_len or m)
    items = sorted(rng.sample(range(m), size))
    return [(i, rng.randint(1, 5)) for i in items]


@st.composite
def rating_rows(draw, m, min_rows=1, max_rows=12):
    n = draw(st.integers(min_rows, max_rows))
    rows = []
    for _ in range(n):
        items = draw(st.sets(st.integers(0, m - 1), min_size=1, max_size=m))
        rows.append([(i, draw(st.integers(1, 5))) for i in sorted(items)])
    return rows


@st.composite
def matrices(draw, min_rows=1, max_rows=12, max_m=8):
    m = draw(st.integers(1, max_m))
    return matrix_from_rows(draw(rating_rows(m, min_rows, max_rows)), m)
