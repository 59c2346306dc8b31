#!/usr/bin/env python3
"""Regenerate the packaged calibration values from a large reference run.

The calibrated suites bound quantities that are only finite up to an
unspecified constant, so their reference values are empirical: the raw
worst statistic over a big deterministic sample.  Checks pass while fresh
statistics stay within CALIBRATION_MARGIN times these values.  Rerun this
after any change to the sampling clouds or the underlying formulas and
commit the refreshed JSON.
"""

import argparse
import json
import os

from tubecomp.suites import calibrate

DEFAULT_OUT = os.path.join(
    os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
    "src", "tubecomp", "data", "calibration.json",
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=100000)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--out", default=DEFAULT_OUT)
    args = ap.parse_args()

    caps = calibrate(samples=args.samples, seed=args.seed)
    payload = {
        "_generated": {
            "samples": args.samples,
            "seed": args.seed,
        }
    }
    for name in sorted(caps):
        payload[name] = caps[name]
    os.makedirs(os.path.dirname(args.out), exist_ok=True)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    for name in sorted(caps):
        print("%-24s %.6g" % (name, caps[name]))
    print("wrote %s" % args.out)


if __name__ == "__main__":
    main()
