#!/usr/bin/env python3
"""Walk one request through the full session lifecycle: submit, fill missing
parameters from schema defaults, confirm, and print the results."""

import argparse
import json
import tempfile

from cimdse.orchestrator import Orchestrator

DEFAULT_REQUEST = ("Simulate ResNet-50 on ImageNet with a 22nm SRAM macro. "
                   "The subarray size is 256x256 with a SAR ADC, ADC "
                   "precision 6bit, and mux 8.")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--request", default=DEFAULT_REQUEST)
    parser.add_argument("--data-dir", help="persistence directory "
                                           "(default: temporary)")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        orch = Orchestrator(args.data_dir or tmp, seed=args.seed)
        session = orch.create_session()
        turn = orch.submit(session.id, args.request)
        print("turn:", json.dumps(turn, indent=2))
        if turn.get("error") or turn.get("category") == "Unknown":
            raise SystemExit(1)
        if session.state == "awaiting_adjustment":
            turn = orch.adjust(session.id, [{"op": "use_defaults"}])
            print("after defaults:", json.dumps(turn, indent=2))
        job = orch.confirm(session.id)
        print("results:", json.dumps(orch.results(job.id), indent=2))


if __name__ == "__main__":
    main()
