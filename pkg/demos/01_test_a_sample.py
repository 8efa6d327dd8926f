"""Test a sample on the sphere for uniformity with all five methods.

Draws one null sample and one concentrated (FvML) sample at n = p = 80
and prints the decision table for each.
"""

import numpy as np

from sphuni import METHODS, Fvml, RngSeed, TestOutcome, Uniform, run_test, sample

N = P = 80
ALPHA = 0.05


def show(label, points, seed):
    rng = RngSeed(seed).generator()
    print(f"\n{label} (n={points.n}, p={points.p})")
    print("  " + TestOutcome.csv_header())
    for method in METHODS:
        out = run_test(points, method, alpha=ALPHA, rng=rng)
        print("  " + out.csv_row())


def main():
    null_sample = sample(Uniform(P), N, RngSeed(2026, 0))
    show("uniform sample", null_sample, seed=1)

    kappa = 2.0 * P**0.75 / np.sqrt(N)  # tau = 2 on the local scale
    signal_sample = sample(Fvml(P, kappa), N, RngSeed(2026, 1))
    show(f"FvML sample, kappa = {kappa:.2f}", signal_sample, seed=1)


if __name__ == "__main__":
    main()
