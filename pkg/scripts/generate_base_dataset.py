#!/usr/bin/env python3
"""Exhaustively evaluate a built-in space and save the records as a reusable
base dataset for transfer-driven pruning."""

import argparse

from cimdse.pruning import BaseDataset
from cimdse.space import load_builtin_space
from cimdse.surrogate import SurrogateConfig, simulate
from cimdse.workloads import get_workload


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--space", default="vitb_22nm")
    parser.add_argument("--workload", default="vitb")
    parser.add_argument("--out", default="results/vitb_base.jsonl")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    space = load_builtin_space(args.space)
    workload = get_workload(args.workload)
    cfg = SurrogateConfig(seed=args.seed)
    base = BaseDataset.build(space, lambda pt: simulate(pt, workload, cfg))
    base.save(args.out, schema_name=args.space)
    print(f"wrote {len(base.records)} records to {args.out}")


if __name__ == "__main__":
    main()
