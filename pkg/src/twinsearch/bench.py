"""k-twin timing experiments, the oracle-equivalence check and the sub-list analysis.

The benchmark clones one seeded-random user's ratings ``k`` times. The source
user is held out of the base matrix, so the first clone has no twin in the
store and takes the slow path while clones 2..k find an earlier clone.
Both arms (TwinSearch and the full rebuild) run on their own copy of the
state and are compared entry for entry after every clone.
"""

from __future__ import annotations

import csv
import logging
import random
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .distribution import bucket_counts, largest_bucket
from .ratings import RatingMatrix, generate_synthetic, load
from .similarity import DEFAULT_TOLERANCE, SimilarityStore, build_all, build_list_full
from .twin import OpCounters, TwinSearchConfig, add_user_fast, add_user_slow, twin_search

log = logging.getLogger(__name__)

BENCH_COLUMNS = ["method", "twin_index", "wall_time_ns", "sims", "range_searches", "set0", "verifications", "fallback"]
ANALYZE_COLUMNS = ["user", "mu", "sigma", "x", "bucket_max_fraction", "eq3_fraction"]


class DivergenceError(AssertionError):
    """The fast and slow arms produced different similarity stores."""


@dataclass
class BenchConfig:
    dataset: str | None = None
    format: str = "movielens"  # movielens | csv | synthetic
    mode: str = "user"  # user | item
    k: int = 30
    c: int = 3
    seed: int = 0
    tolerance: float = DEFAULT_TOLERANCE
    out: str | None = None
    repeats: int = 5
    # synthetic-only shape
    n: int = 200
    m: int = 100
    density: float = 0.1

    def __post_init__(self):
        if self.k < 1 or self.c < 1 or self.repeats < 1:
            raise ValueError("k, c and repeats must be >= 1")
        if self.mode not in ("user", "item"):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass
class BenchRow:
    method: str
    twin_index: int
    wall_time_ns: int
    counters: OpCounters

    def as_list(self) -> list:
        c = self.counters
        return [self.method, self.twin_index, self.wall_time_ns, c.sims, c.range_searches, c.set0, c.verifications, int(c.fallback)]


@dataclass
class BenchResult:
    rows: list[BenchRow] = field(default_factory=list)
    n_base: int = 0
    source_user: int = -1

    def totals(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for r in self.rows:
            out[r.method] = out.get(r.method, 0) + r.wall_time_ns
        return out

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(BENCH_COLUMNS)
            for r in self.rows:
                w.writerow(r.as_list())


def load_matrix(config) -> RatingMatrix:
    if config.format == "synthetic":
        matrix = generate_synthetic(config.n, config.m, config.density, config.seed)
    else:
        if not config.dataset:
            raise ValueError("--dataset is required for non-synthetic formats")
        matrix, _ = load(config.dataset, config.format)
    if getattr(config, "mode", "user") == "item":
        matrix = matrix.transpose()
    return matrix


def hold_out(matrix: RatingMatrix, u: int) -> RatingMatrix:
    keep = [v for v in range(matrix.n) if v != u]
    return RatingMatrix(
        matrix.m,
        [matrix.items[v] for v in keep],
        [matrix.ratings[v] for v in keep],
        [matrix.user_ids[v] for v in keep],
        list(matrix.item_ids),
    )


def _timed(op: Callable, matrix: RatingMatrix, store: SimilarityStore, repeats: int):
    """Median wall time of ``op`` over ``repeats`` runs.

    ``op`` adds one user; every run but the last is undone afterwards so the
    state advances by exactly one user.
    """
    times = []
    out = None
    for rep in range(repeats):
        t0 = time.perf_counter_ns()
        out = op(matrix, store)
        times.append(max(1, time.perf_counter_ns() - t0))
        if rep < repeats - 1:
            store.remove_user(out[0])
            matrix.pop_user()
    return int(statistics.median(times)), out


def cmd_bench(config: BenchConfig) -> BenchResult:
    matrix = load_matrix(config)
    src = random.Random(config.seed).randrange(matrix.n)
    twin_row = matrix.row(src)
    base = hold_out(matrix, src)
    log.info("base matrix %d x %d, twin source %d (%d ratings)", base.n, base.m, src, len(twin_row))

    store = build_all(base, config.tolerance)
    fast_m, fast_s = base, store
    slow_m, slow_s = base.copy(), store.copy()
    ts_config = TwinSearchConfig(config.c, config.seed, config.tolerance)
    result = BenchResult(n_base=base.n, source_user=src)

    for j in range(1, config.k + 1):
        t_fast, (u_fast, c_fast) = _timed(
            lambda m, s: add_user_fast(m, s, twin_row, ts_config), fast_m, fast_s, config.repeats
        )
        t_slow, (u_slow, c_slow) = _timed(
            lambda m, s: add_user_slow(m, s, twin_row), slow_m, slow_s, config.repeats
        )
        if u_fast != u_slow or not fast_s.same_as(slow_s, config.tolerance):
            raise DivergenceError(f"stores diverged after twin {j}")
        result.rows.append(BenchRow("twinsearch", j, t_fast, c_fast))
        result.rows.append(BenchRow("baseline", j, t_slow, c_slow))
        log.debug("twin %d: fast %.3f ms %s, slow %.3f ms", j, t_fast / 1e6, c_fast, t_slow / 1e6)

    if config.out:
        result.write_csv(config.out)
    return result


# -- oracle equivalence ------------------------------------------------------


def oracle_trial(seed: int, c: int = 3, tolerance: float = DEFAULT_TOLERANCE) -> str | None:
    """One random instance with an injected twin; None on success, else a reason.

    Shape is drawn from n in [50, 500], m in [20, 200], density in [0.05, 0.2].
    """
    rng = random.Random(seed)
    n, m = rng.randint(50, 500), rng.randint(20, 200)
    density = rng.uniform(0.05, 0.2)
    matrix = generate_synthetic(n, m, density, seed)
    store = build_all(matrix, tolerance)
    src = rng.randrange(n)
    u0 = matrix.add_user(matrix.row(src))
    res = twin_search(matrix, store, u0, TwinSearchConfig(c, seed, tolerance))
    if not res.found:
        return f"no twin found (n={n}, m={m}, |Set_0|={res.counters.set0})"
    expected = build_list_full(matrix, u0)
    if res.slist.others() != expected.others():
        return "neighbour order differs from full build"
    if any(abs(a - b) > tolerance for a, b in zip(res.slist.sims(), expected.sims())):
        return "similarity values differ from full build"
    return None


@dataclass
class VerifyReport:
    trials: int
    failures: list[tuple[int, str]]

    @property
    def passed(self) -> bool:
        return not self.failures


def cmd_verify(trials: int = 200, seed: int = 0, c: int = 3, tolerance: float = DEFAULT_TOLERANCE) -> VerifyReport:
    if trials == 0:
        log.warning("verify called with 0 trials; nothing checked")
    failures = []
    for t in range(trials):
        reason = oracle_trial(seed + t, c, tolerance)
        if reason is not None:
            failures.append((seed + t, reason))
    return VerifyReport(trials, failures)


# -- distribution analysis ----------------------------------------------------


@dataclass
class AnalyzeConfig:
    dataset: str | None = None
    format: str = "movielens"
    mode: str = "user"
    x: int = 10
    seeds: int = 50
    c: int = 3
    tolerance: float = DEFAULT_TOLERANCE
    out: str | None = None
    n: int = 200
    m: int = 100
    density: float = 0.1
    seed: int = 0


@dataclass
class AnalyzeResult:
    user_rows: list[list]
    set0: list[int]
    n: int

    @property
    def median_ratio(self) -> float:
        """Median |Set_0| relative to the n/125 bound."""
        return statistics.median(self.set0) / (self.n / 125) if self.set0 else float("nan")


def cmd_analyze(config: AnalyzeConfig) -> AnalyzeResult:
    matrix = load_matrix(config)
    store = build_all(matrix, config.tolerance)
    rows = []
    for u in range(matrix.n):
        slist = store[u]
        try:
            rep = largest_bucket(slist, config.x)
            rows.append([matrix.user_ids[u], rep.model.mu, rep.model.sigma, config.x, rep.empirical_fraction, rep.fraction])
        except ValueError:
            # constant list or a single neighbour: no Gaussian fit, no prediction
            sims = slist.sims()
            sigma = statistics.stdev(sims) if len(sims) > 1 else float("nan")
            share = max(bucket_counts(sims, config.x)) / len(sims)
            rows.append([matrix.user_ids[u], statistics.fmean(sims), sigma, config.x, share, float("nan")])

    set0 = []
    c = min(config.c, matrix.n)
    for s in range(config.seeds):
        src = random.Random(s).randrange(matrix.n)
        probe = matrix.copy()
        u0 = probe.add_user(matrix.row(src))
        res = twin_search(probe, store, u0, TwinSearchConfig(c, s, config.tolerance))
        set0.append(res.counters.set0)

    result = AnalyzeResult(rows, set0, matrix.n)
    if config.out:
        out = Path(config.out)
        with open(out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(ANALYZE_COLUMNS)
            for r in rows:
                w.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in r])
        with open(out.with_name(out.stem + "_set0" + out.suffix), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["seed", "set0"])
            w.writerows(enumerate(set0))
    return result
