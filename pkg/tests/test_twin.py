import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import matrix_from_rows, random_row
from twinsearch.ratings import generate_synthetic
from twinsearch.similarity import SimilarityEntry, SimilarityList, SimilarityStore, StoreError, build_all, build_list_full, cosine
from twinsearch.twin import (
    OpCounters,
    TwinSearchConfig,
    add_user_fast,
    add_user_slow,
    candidate_set,
    copy_list,
    intersect,
    probe_anchor,
    twin_search,
    verify_twin,
)


def with_twin(n=60, m=30, density=0.2, seed=0, src=None):
    matrix = generate_synthetic(n, m, density, seed)
    store = build_all(matrix)
    src = random.Random(seed).randrange(n) if src is None else src
    u0 = matrix.add_user(matrix.row(src))
    return matrix, store, u0, src


def test_probe_finds_twin_from_arbitrary_anchor():
    matrix, store, u0, src = with_twin(seed=3)
    for anchor in range(matrix.n - 1):
        found, sim = probe_anchor(matrix, store, u0, anchor)
        assert src in found
        # brute force: every member really has that similarity to the anchor
        for x in found - {anchor}:
            assert abs(cosine(matrix, anchor, x) - sim) <= 1e-9


def test_probe_anchor_that_is_the_twin():
    matrix, store, u0, src = with_twin(seed=5)
    found, sim = probe_anchor(matrix, store, u0, src)
    assert sim == 1.0
    assert src in found


def test_probe_empty_and_errors():
    matrix = matrix_from_rows([[(0, 1)], [(1, 1)], [(0, 1), (1, 1)]], 2)
    store = build_all(matrix)
    u0 = matrix.add_user([(0, 5), (1, 1)])
    # sim(u0, user 2) is 6/sqrt(52), not a value in user 2's list
    found, _ = probe_anchor(matrix, store, u0, 2)
    assert found == set()
    with pytest.raises(ValueError):
        probe_anchor(matrix, store, u0, u0)
    del store.lists[1]
    with pytest.raises(StoreError):
        probe_anchor(matrix, store, u0, 1)


def test_intersect_examples():
    assert intersect([{1, 2, 3}, {2, 3}, {3}]) == {3}
    assert intersect([{1, 2}, set(), {1}]) == set()
    assert intersect([{4}]) == {4}
    with pytest.raises(ValueError):
        intersect([])


def merge_intersect(a, b):
    a, b = sorted(a), sorted(b)
    i = j = 0
    out = []
    while i < len(a) and j < len(b):
        if a[i] == b[j]:
            out.append(a[i])
            i += 1
            j += 1
        elif a[i] < b[j]:
            i += 1
        else:
            j += 1
    return set(out)


def test_intersect_random_vs_sorted_merge():
    rng = random.Random(12)
    for _ in range(20):
        sets = [set(rng.sample(range(300), 100)) for _ in range(3)]
        assert intersect(sets) == merge_intersect(merge_intersect(sets[0], sets[1]), sets[2])


def test_verify_rejects_scaled_rows():
    # a row scaled by 2 has the same cosine to everyone, so it survives every probe
    rows = [[(0, 1), (1, 2)], [(0, 2), (1, 4)], [(0, 3)], [(1, 5), (2, 1)], [(0, 1), (2, 2)]]
    matrix = matrix_from_rows(rows, 3)
    store = build_all(matrix)
    u0 = matrix.add_user([(0, 2), (1, 4)])
    set0, _ = candidate_set(matrix, store, u0, [2, 3, 4])
    assert {0, 1} <= set0
    assert not verify_twin(matrix, u0, 0)
    assert verify_twin(matrix, u0, 1)
    res = twin_search(matrix, store, u0, TwinSearchConfig(c=3))
    assert res.twin == 1
    assert res.counters.verifications == 2


def test_verify_length_mismatch():
    matrix = matrix_from_rows([[(0, 1)], [(0, 1), (1, 1)]], 2)
    assert not verify_twin(matrix, 0, 1)


def test_copy_list_three_users():
    matrix = matrix_from_rows([[(0, 2), (1, 1)], [(0, 1)], [(1, 3), (2, 1)]], 3)
    store = build_all(matrix)
    u0 = matrix.add_user([(0, 2), (1, 1)])
    slist = copy_list(store, 0, u0)
    assert slist.owner == u0
    assert slist[0] == SimilarityEntry(0, 1.0)
    assert slist == build_list_full(matrix, u0)
    assert 0 not in store[0].others()  # twin's own list untouched


def test_copy_list_single_user_store():
    store = SimilarityStore()
    store.add_list(SimilarityList(0))
    slist = copy_list(store, 0, 1)
    assert list(slist) == [SimilarityEntry(0, 1.0)]


def test_copy_list_refuses_existing_list():
    matrix, store, u0, src = with_twin()
    store.add_list(build_list_full(matrix, u0))
    with pytest.raises(StoreError):
        copy_list(store, src, u0)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 5))
def test_twin_search_matches_full_build(seed, c):
    matrix, store, u0, src = with_twin(n=40, m=25, density=0.15, seed=seed)
    res = twin_search(matrix, store, u0, TwinSearchConfig(c=c, seed=seed))
    assert res.found
    assert matrix.row_equal(u0, res.twin)
    assert res.slist == build_list_full(matrix, u0)
    assert res.counters.sims == c and res.counters.range_searches == c
    assert 1 <= res.counters.verifications <= res.counters.set0
    # soundness: the source twin is in every anchor's candidate set
    for a in res.anchors:
        assert src in probe_anchor(matrix, store, u0, a)[0]


def test_twin_search_no_twin():
    # every anchor probe comes back empty: u0's sims match nothing in any list
    matrix = matrix_from_rows([[(0, 1)], [(1, 1)], [(2, 1)], [(0, 1), (1, 1), (2, 1)]], 4)
    store = build_all(matrix)
    u0 = matrix.add_user([(0, 5), (1, 2), (2, 1), (3, 1)])
    res = twin_search(matrix, store, u0, TwinSearchConfig(c=3, seed=1))
    assert not res.found
    assert res.counters == OpCounters(sims=3, range_searches=3, set0=0, verifications=0, fallback=False)


def test_twin_search_too_many_anchors():
    matrix, store, u0, _ = with_twin(n=5, m=10, density=0.5)
    with pytest.raises(ValueError):
        twin_search(matrix, store, u0, TwinSearchConfig(c=6))
    twin_search(matrix, store, u0, TwinSearchConfig(c=5))


def test_config_rejects_zero_c():
    with pytest.raises(ValueError):
        TwinSearchConfig(c=0)


@pytest.mark.parametrize("seed", range(10))
def test_more_anchors_never_grow_set0(seed):
    matrix, store, u0, _ = with_twin(n=80, m=20, density=0.1, seed=seed)
    anchors = random.Random(seed).sample([u for u in range(matrix.n - 1)], 6)
    prev = None
    for c in range(1, 7):
        set0, _ = candidate_set(matrix, store, u0, anchors[:c])
        if prev is not None:
            assert set0 <= prev
        prev = set0


def test_add_user_fast_k_twins():
    matrix = generate_synthetic(50, 30, 0.2, 17)
    store = build_all(matrix)
    slow_m, slow_s = matrix.copy(), store.copy()
    row = [(i, 3) for i in range(0, 30, 3)]
    n_before = matrix.n
    for j in range(5):
        u, counters = add_user_fast(matrix, store, row, TwinSearchConfig(seed=j))
        add_user_slow(slow_m, slow_s, row)
        if j == 0:
            assert counters.fallback
            assert counters.sims == n_before  # n - 1 with the new user counted
        else:
            assert not counters.fallback
            assert counters.sims == 3
        assert store.audit() == []
        assert store.lists == slow_s.lists


@pytest.mark.parametrize("seed", range(10))
def test_fallback_store_equals_baseline(seed):
    rng = random.Random(seed)
    matrix = generate_synthetic(40, 20, 0.2, seed)
    store = build_all(matrix)
    slow_m, slow_s = matrix.copy(), store.copy()
    while True:
        row = random_row(rng, 20, 6)
        if all(matrix.row(u) != row for u in range(matrix.n)):
            break
    _, counters = add_user_fast(matrix, store, row, TwinSearchConfig(seed=seed))
    add_user_slow(slow_m, slow_s, row)
    assert counters.fallback
    assert counters.sims == matrix.n - 1
    assert store.lists == slow_s.lists


def test_add_user_fast_on_empty_store():
    matrix = matrix_from_rows([[(0, 1)]], 2)
    store = SimilarityStore()
    store.add_list(build_list_full(matrix, 0))
    u, counters = add_user_fast(matrix, store, [(0, 1)])
    assert not counters.fallback  # c is clamped to the single existing user
    assert store[u].others() == [0]


def test_counters_csv_row():
    c = OpCounters(sims=3, range_searches=3, set0=2, verifications=1, fallback=False)
    assert OpCounters.CSV_HEADER == "phase,sims,range_searches,set0,verifications,fallback"
    assert c.csv_row("twin2") == "twin2,3,3,2,1,0"
