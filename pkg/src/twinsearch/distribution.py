"""Gaussian model of similarity lists and the largest sub-list bound.

A similarity list is modelled as a normal distribution truncated to [0, 1].
Partitioning [0, 1] into ``x`` equal buckets, the share of users in one
bucket [mu - k3*sigma, mu + k4*sigma] relative to the mass on
[mu - k1*sigma, mu + k2*sigma] = [0, 1] is

    (Phi(k3) + Phi(k4) - 1) / (Phi(k1) + Phi(k2) - 1)

and the largest such share bounds the size of the final candidate set.
"""

from __future__ import annotations

import bisect
import math
import statistics
from dataclasses import dataclass
from typing import Iterable

K_CLAMP = 8.0


def normal_cdf(z: float) -> float:
    """Standard normal CDF, accurate to double precision in both tails."""
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


@dataclass(frozen=True)
class GaussianModel:
    mu: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")


@dataclass(frozen=True)
class SublistParams:
    k1: float
    k2: float
    k3: float
    k4: float
    x: int | None = None

    def __post_init__(self):
        if not (0 <= self.k1 <= 4 and 0 < self.k2 <= 4 and self.k3 >= 0 and self.k4 > 0):
            raise ValueError(f"k values violate 0<=k1<=4, 0<k2<=4, k3>=0, k4>0: {self}")
        if self.x is not None and self.x < 1:
            raise ValueError("partition count x must be >= 1")

    def swapped(self) -> SublistParams:
        return SublistParams(self.k3, self.k4, self.k1, self.k2, self.x)


@dataclass(frozen=True)
class LPSolution:
    params: SublistParams
    mu: float
    sigma: float


@dataclass(frozen=True)
class SublistReport:
    fraction: float
    empirical_fraction: float
    bucket_bounds: tuple[tuple[float, float], ...]
    counts: tuple[int, ...]
    largest: int
    model: GaussianModel


class SigmaZeroError(ValueError):
    pass


def _phi_ratio(k1: float, k2: float, k3: float, k4: float) -> float:
    denom = normal_cdf(k1) + normal_cdf(k2) - 1.0
    if denom <= 0:
        raise ValueError("denominator Phi(k1) + Phi(k2) - 1 must be positive")
    return (normal_cdf(k3) + normal_cdf(k4) - 1.0) / denom


def sublist_fraction(params: SublistParams) -> float:
    """s / n for the bucket described by ``params``."""
    return _phi_ratio(params.k1, params.k2, params.k3, params.k4)


def stated_lp_solution() -> LPSolution:
    """The stated optimum k = (0, 4, 0, 0.01) with the mu, sigma it induces.

    mu - k1*sigma = 0 and mu + k2*sigma = 1 give mu = 0, sigma = 1/4. This is
    recorded as given; optimality is not checked (the objective is not
    linear in k).
    """
    k1, k2 = 0.0, 4.0
    sigma = 1.0 / (k1 + k2)
    mu = k1 * sigma
    return LPSolution(SublistParams(k1, k2, 0.0, 0.01), mu, sigma)


def _values(sims) -> list[float]:
    # accepts a SimilarityList or any iterable of floats
    if hasattr(sims, "sims"):
        return sims.sims()
    return [float(s) for s in sims]


def fit_gaussian(sims: Iterable[float]) -> GaussianModel:
    """Sample mean and sample (n-1) standard deviation of a list's sims."""
    values = _values(sims)
    if len(values) < 2:
        raise ValueError("need at least two similarities to fit")
    sigma = statistics.stdev(values)
    if sigma == 0:
        raise SigmaZeroError("all similarities are identical")
    return GaussianModel(statistics.fmean(values), sigma)


def bucket_bounds(x: int) -> tuple[tuple[float, float], ...]:
    return tuple((j / x, (j + 1) / x) for j in range(x))


def bucket_counts(sims: Iterable[float], x: int) -> list[int]:
    """Counts per bucket [j/x, (j+1)/x); the last bucket also takes 1.0."""
    if x < 1:
        raise ValueError("x must be >= 1")
    lower_edges = [j / x for j in range(x)]
    counts = [0] * x
    for s in _values(sims):
        counts[max(0, bisect.bisect_right(lower_edges, s) - 1)] += 1
    return counts


def predicted_fraction(model: GaussianModel, lo: float, hi: float) -> float:
    """Model share of [lo, hi] within [0, 1], via the ratio-of-Phi form.

    k values are signed distances from mu in sigmas (negative when the edge
    lies on the other side of mu), clamped to +-8.
    """
    def k(v):
        return max(-K_CLAMP, min(K_CLAMP, v))

    k1 = k(model.mu / model.sigma)
    k2 = k((1.0 - model.mu) / model.sigma)
    k3 = k((model.mu - lo) / model.sigma)
    k4 = k((hi - model.mu) / model.sigma)
    return _phi_ratio(k1, k2, k3, k4)


def largest_bucket(sims: Iterable[float], x: int) -> SublistReport:
    """Measured largest-bucket share next to its Gaussian prediction.

    Raises :class:`SigmaZeroError` when every similarity is the same.
    """
    values = _values(sims)
    counts = bucket_counts(values, x)
    model = fit_gaussian(values)
    largest = max(range(x), key=lambda j: counts[j])
    bounds = bucket_bounds(x)
    lo, hi = bounds[largest]
    return SublistReport(
        predicted_fraction(model, lo, hi),
        counts[largest] / len(values),
        bounds,
        tuple(counts),
        largest,
        model,
    )
