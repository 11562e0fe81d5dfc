"""Command line entry point: ``twinsearch bench|verify|analyze``."""

from __future__ import annotations

import argparse
import logging
import sys

from .bench import AnalyzeConfig, BenchConfig, DivergenceError, cmd_analyze, cmd_bench, cmd_verify
from .ratings import DatasetError
from .similarity import DEFAULT_TOLERANCE

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _dataset_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dataset", help="path to u.data or a user,item,rating CSV")
    p.add_argument("--format", choices=["movielens", "csv", "synthetic"], default="movielens")
    p.add_argument("--mode", choices=["user", "item"], default="user")
    p.add_argument("--n", type=int, default=200, help="synthetic users")
    p.add_argument("--m", type=int, default=100, help="synthetic items")
    p.add_argument("--density", type=float, default=0.1, help="synthetic density")
    p.add_argument("--c", type=int, default=3, help="anchor users per search")
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twinsearch")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bench", help="time TwinSearch against full rebuilds for k identical users")
    _dataset_args(p)
    p.add_argument("--k", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--out", default="bench.csv")

    p = sub.add_parser("verify", help="randomised TwinSearch vs full-build equivalence check")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--c", type=int, default=3)
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)

    p = sub.add_parser("analyze", help="per-user similarity distribution and |Set_0| samples")
    _dataset_args(p)
    p.add_argument("--x", type=int, default=10, help="number of similarity buckets")
    p.add_argument("--seeds", type=int, default=50)
    p.add_argument("--out", default="analyze.csv")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(levelname)s %(message)s")
    try:
        if args.command == "bench":
            cfg = BenchConfig(
                args.dataset, args.format, args.mode, args.k, args.c, args.seed,
                args.tolerance, args.out, args.repeats, args.n, args.m, args.density,
            )
            res = cmd_bench(cfg)
            totals = res.totals()
            ratio = totals["twinsearch"] / totals["baseline"]
            print(f"twinsearch {totals['twinsearch'] / 1e6:.1f} ms, baseline {totals['baseline'] / 1e6:.1f} ms, ratio {ratio:.3f}")
            print(f"wrote {len(res.rows)} rows to {args.out}")
        elif args.command == "verify":
            rep = cmd_verify(args.trials, args.seed, args.c, args.tolerance)
            for seed, reason in rep.failures:
                print(f"FAIL seed={seed}: {reason}")
            print(f"{rep.trials - len(rep.failures)}/{rep.trials} trials passed")
            return EXIT_OK if rep.passed else EXIT_FAIL
        elif args.command == "analyze":
            cfg = AnalyzeConfig(
                args.dataset, args.format, args.mode, args.x, args.seeds, args.c,
                args.tolerance, args.out, args.n, args.m, args.density,
            )
            res = cmd_analyze(cfg)
            print(f"{len(res.user_rows)} users; median |Set_0| / (n/125) = {res.median_ratio:.4f}")
    except DivergenceError as e:
        print(f"correctness failure: {e}", file=sys.stderr)
        return EXIT_FAIL
    except (OSError, DatasetError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
