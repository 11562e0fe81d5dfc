"""Compare measured largest-bucket shares of MovieLens similarity lists with
the Gaussian prediction, and measured |Set_0| with the n/125 bound."""

import argparse
import csv
import math
import statistics
from pathlib import Path

from twinsearch.bench import AnalyzeConfig, cmd_analyze
from twinsearch.distribution import stated_lp_solution, sublist_fraction

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dataset", default=str(ROOT / "data" / "ml-100k" / "u.data"))
    ap.add_argument("--mode", choices=["user", "item"], default="user")
    ap.add_argument("--x", type=int, default=10)
    ap.add_argument("--seeds", type=int, default=50)
    ap.add_argument("--out", type=Path, default=ROOT / "results" / "analyze.csv")
    args = ap.parse_args()
    args.out.parent.mkdir(parents=True, exist_ok=True)

    res = cmd_analyze(AnalyzeConfig(args.dataset, mode=args.mode, x=args.x, seeds=args.seeds, out=str(args.out)))
    emp = [r[4] for r in res.user_rows]
    pred = [r[5] for r in res.user_rows if not math.isnan(r[5])]
    sol = stated_lp_solution()
    print(f"stated optimum k={sol.params.k1, sol.params.k2, sol.params.k3, sol.params.k4}: s/n = {sublist_fraction(sol.params):.6f} (1/125 = {1 / 125})")
    print(f"largest bucket share, x={args.x}: measured median {statistics.median(emp):.4f}, Gaussian median {statistics.median(pred):.4f}")
    print(f"|Set_0| over {args.seeds} seeds: min {min(res.set0)}, median {statistics.median(res.set0)}, max {max(res.set0)}")
    print(f"median |Set_0| / (n/125) = {res.median_ratio:.4f} with n = {res.n}")
    with open(args.out, newline="") as fh:
        print(f"per-user report: {args.out} ({sum(1 for _ in csv.reader(fh)) - 1} rows)")


if __name__ == "__main__":
    main()
