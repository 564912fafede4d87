#!/usr/bin/env python3
"""Run a (task x policy x seed) grid and write one metric row per cell.

Example:
    python3 scripts/run_grid.py --tasks sku200.single_store.standard \
        sku200.single_store.lowest_capacity --policies bs-static ss-static \
        ss-hindsight --seeds 0 1 2 --out grid.csv
"""

import argparse
import csv
import sys

from stockbench.harness import run


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--tasks", nargs="+", required=True)
    parser.add_argument("--policies", nargs="+", required=True)
    parser.add_argument("--seeds", nargs="+", type=int, default=[0])
    parser.add_argument("--split", default="test")
    parser.add_argument("--out", default="grid.csv")
    args = parser.parse_args()

    rows = []
    for task in args.tasks:
        for policy in args.policies:
            for seed in args.seeds:
                result = run(task, policy, split=args.split, seed=seed)
                rows.append({
                    "task": task,
                    "policy": policy,
                    "seed": seed,
                    "metric": float(result.metric),
                    "wall_clock_s": round(result.wall_clock, 3),
                })
                print(f"{task} {policy} seed={seed}: {float(result.metric):.1f}")

    with open(args.out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
