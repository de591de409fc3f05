#!/usr/bin/env python3
"""Measure how additive Gaussian noise raises the aliasing score of
natural-image-like (1/f spectrum) tensors.

Sigma is expressed as a fraction of each tensor's value range.
"""

import argparse
import csv
import sys

from alias_scope.antialias import CutoffSpec, add_gaussian_noise, aliasing_score
from alias_scope.synth import one_over_f


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=20)
    parser.add_argument("--size", type=int, default=32)
    parser.add_argument("--cutoff", type=float, default=0.25)
    parser.add_argument(
        "--levels", type=float, nargs="+", default=[0.0, 0.02, 0.05, 0.1, 0.2],
        help="noise sigma as a fraction of the signal range",
    )
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--csv", help="also write per-trial rows here")
    args = parser.parse_args()

    cutoff = CutoffSpec(args.cutoff)
    rows = []
    for trial in range(args.trials):
        f = one_over_f((1, args.size, args.size), args.seed + trial)
        value_range = float(f.data.max() - f.data.min())
        scores = []
        for level in args.levels:
            noisy = add_gaussian_noise(f, level * value_range, seed=trial * 1000)
            scores.append(aliasing_score(noisy, cutoff))
        rows.append(scores)

    header = [f"sigma={lv:g}R" for lv in args.levels]
    print(f"cutoff={args.cutoff}  {args.trials} trials of "
          f"{args.size}x{args.size} 1/f tensors")
    print("trial  " + "  ".join(f"{h:>12}" for h in header))
    for i, scores in enumerate(rows):
        print(f"{i:5d}  " + "  ".join(f"{s:12.6f}" for s in scores))
    means = [sum(col) / len(col) for col in zip(*rows)]
    print("mean   " + "  ".join(f"{m:12.6f}" for m in means))

    monotone = all(
        all(a < b for a, b in zip(r, r[1:])) for r in rows
    )
    print(f"strictly increasing across levels in every trial: {monotone}")

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["trial"] + header)
            for i, scores in enumerate(rows):
                writer.writerow([i] + [f"{s:.10g}" for s in scores])
        print(f"wrote {args.csv}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
