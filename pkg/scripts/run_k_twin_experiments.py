"""The four k-twin timing runs: user/item mode on MovieLens and on a synthetic
stand-in for the larger film dataset (about 130 ratings per user, scaled down
to desk size). Writes one bench CSV per run and prints the totals."""

import argparse
import logging
from pathlib import Path

from twinsearch.bench import BenchConfig, cmd_bench

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--movielens", default=str(ROOT / "data" / "ml-100k" / "u.data"))
    ap.add_argument("--out-dir", type=Path, default=ROOT / "results")
    ap.add_argument("--k", type=int, default=30)
    ap.add_argument("--c", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--synthetic-n", type=int, default=2000)
    ap.add_argument("--synthetic-m", type=int, default=2000)
    ap.add_argument("--synthetic-density", type=float, default=0.065)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    args.out_dir.mkdir(parents=True, exist_ok=True)

    runs = []
    for mode in ("user", "item"):
        runs.append((f"movielens_{mode}", BenchConfig(args.movielens, "movielens", mode, args.k, args.c, args.seed)))
        runs.append((
            f"synthetic_{mode}",
            BenchConfig(
                None, "synthetic", mode, args.k, args.c, args.seed,
                n=args.synthetic_n, m=args.synthetic_m, density=args.synthetic_density,
            ),
        ))

    print(f"{'run':<18} {'twinsearch ms':>14} {'baseline ms':>12} {'ratio':>7}")
    for name, cfg in runs:
        cfg.out = str(args.out_dir / f"{name}.csv")
        res = cmd_bench(cfg)
        t = res.totals()
        print(f"{name:<18} {t['twinsearch'] / 1e6:>14.1f} {t['baseline'] / 1e6:>12.1f} {t['twinsearch'] / t['baseline']:>7.3f}")


if __name__ == "__main__":
    main()
