#!/usr/bin/env python3
"""Per-batch-size unique-sample counts for SA/GA/TPE and the resulting
estimated average total runtime, written as a CSV table."""

import argparse

from cimdse.experiments import batch_runtime_table


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/batch_runtime.csv")
    parser.add_argument("--space", default="resnet50_22nm")
    parser.add_argument("--workload", default="resnet50")
    parser.add_argument("--iterations", type=int, default=40)
    parser.add_argument("--batch-sizes", type=int, nargs="+",
                        default=[16, 32, 48])
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rows = batch_runtime_table(
        args.out, space_name=args.space, workload=args.workload,
        seed=args.seed, iterations=args.iterations,
        batch_sizes=tuple(args.batch_sizes))
    for row in rows:
        print(row)
    print(f"wrote {len(rows)} rows to {args.out}")


if __name__ == "__main__":
    main()
