"""Similarity lists for neighbourhood CF with a fast path for duplicate users."""

from .distribution import (
    GaussianModel,
    SublistParams,
    SublistReport,
    fit_gaussian,
    largest_bucket,
    normal_cdf,
    stated_lp_solution,
    sublist_fraction,
)
from .ratings import DatasetError, DatasetMeta, RatingMatrix, generate_synthetic, parse_csv, parse_movielens
from .similarity import (
    SimilarityEntry,
    SimilarityList,
    SimilarityStore,
    build_all,
    build_list_full,
    cosine,
)
from .twin import OpCounters, TwinSearchConfig, add_user_fast, twin_search

__version__ = "0.1.0"
