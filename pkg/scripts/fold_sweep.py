#!/usr/bin/env python3
"""Verify the alias-fold prediction against measured spectra.

For each tone frequency and stride, subsample a pure cosine and compare
the dominant DFT bin of the result with the predicted fold.
"""

import argparse
import sys

import numpy as np

from alias_scope.sampling import predicted_alias_frequency, subsample
from alias_scope.spectral import fft2, signed_frequencies
from alias_scope.synth import tone


def measured_fold(k: float, stride: int, width: int) -> float:
    f = tone((1, stride, width), freq_w=k)
    sub = subsample(f, stride)
    power = (np.abs(fft2(sub).coeffs[0]) ** 2).sum(axis=0)
    return abs(signed_frequencies(len(power))[int(np.argmax(power))])


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--width", type=int, default=64)
    parser.add_argument("--strides", type=int, nargs="+", default=[2, 4])
    parser.add_argument(
        "--numerators", type=int, nargs="+", default=list(range(1, 8)),
        help="tone frequencies k = n/16",
    )
    args = parser.parse_args()

    print(f"{'k':>8} {'stride':>6} {'predicted':>10} {'measured':>10} {'match':>6}")
    mismatches = 0
    for stride in args.strides:
        for num in args.numerators:
            k = num / 16
            predicted = predicted_alias_frequency(k, stride)
            measured = measured_fold(k, stride, args.width)
            ok = abs(predicted - measured) < 1e-9
            mismatches += not ok
            print(
                f"{k:8.4f} {stride:6d} {predicted:10.4f} {measured:10.4f} "
                f"{'yes' if ok else 'NO'}"
            )
    print(f"mismatches: {mismatches}")
    return 1 if mismatches else 0


if __name__ == "__main__":
    sys.exit(main())
