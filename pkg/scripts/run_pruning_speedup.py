#!/usr/bin/env python3
"""Paired-seed comparison of pruned vs unpruned search on a target space,
using a base dataset built from a sibling space. Emits a CSV with per-seed
evaluations-to-within-1%-of-optimum for both variants."""

import argparse

from cimdse.experiments import pruning_speedup
from cimdse.pruning import BaseDataset


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/pruning_speedup.csv")
    parser.add_argument("--target-space", default="swint_22nm")
    parser.add_argument("--target-workload", default="swint")
    parser.add_argument("--base-space", default="vitb_22nm")
    parser.add_argument("--base-workload", default="vitb")
    parser.add_argument("--base-dataset",
                        help="previously saved base dataset; built on the "
                             "fly when omitted")
    parser.add_argument("--seeds", type=int, default=50)
    parser.add_argument("--iterations", type=int, default=25)
    parser.add_argument("--batch", type=int, default=128)
    args = parser.parse_args()

    base = BaseDataset.load(args.base_dataset) if args.base_dataset else None
    rows = pruning_speedup(
        args.out, target_space_name=args.target_space,
        target_workload=args.target_workload,
        base_space_name=args.base_space, base_workload=args.base_workload,
        seeds=tuple(range(args.seeds)), iterations=args.iterations,
        batch_size=args.batch, base=base)
    wins = sum(1 for i in range(0, len(rows), 2)
               if rows[i][4] != "" and rows[i + 1][4] != ""
               and rows[i + 1][4] < rows[i][4])
    print(f"wrote {len(rows)} rows to {args.out} "
          f"(pruned faster on {wins}/{len(rows) // 2} seeds)")


if __name__ == "__main__":
    main()
