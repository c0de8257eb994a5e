#!/usr/bin/env python3
"""Compare RS/SA/GA/TPE over seeds on a built-in space and emit a CSV."""

import argparse

from cimdse.experiments import optimizer_comparison


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/optimizer_comparison.csv")
    parser.add_argument("--space", default="resnet50_22nm")
    parser.add_argument("--workload", default="resnet50")
    parser.add_argument("--seeds", type=int, default=10,
                        help="number of seeds (0..n-1)")
    parser.add_argument("--iterations", type=int, default=80)
    parser.add_argument("--batch", type=int, default=32)
    parser.add_argument("--objective", default="fom")
    args = parser.parse_args()

    rows = optimizer_comparison(
        args.out, space_name=args.space, workload=args.workload,
        seeds=tuple(range(args.seeds)), iterations=args.iterations,
        batch_size=args.batch, objective_metric=args.objective)
    print(f"wrote {len(rows)} rows to {args.out}")


if __name__ == "__main__":
    main()
