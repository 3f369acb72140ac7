"""Randomized check of the two-condition lemma on A = P_r(B - C).

Prints the violation rate per decade of ||C|| / ||B|| and one explicit
instance where neither condition holds.
"""

import argparse

import numpy as np

from hqtrc.hqwtrr import lemma1_check, truncated_svd


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    r = np.random.default_rng(args.seed)
    bins = {}
    for _ in range(args.trials):
        rows, cols = (int(v) for v in r.integers(2, 9, size=2))
        rank = int(r.integers(1, min(rows, cols) + 1))
        decade = int(r.integers(-4, 1))
        b = r.standard_normal((rows, cols))
        c = 10.0 ** (decade + r.random()) * r.standard_normal((rows, cols))
        hit = not any(lemma1_check(b, c, rank))
        n, v = bins.get(decade, (0, 0))
        bins[decade] = (n + 1, v + hit)
    print("log10_scale,trials,violations,rate")
    for decade in sorted(bins):
        n, v = bins[decade]
        print(f"[{decade},{decade + 1}),{n},{v},{v / n:.4f}")

    b, c = np.eye(2), np.diag([0.0, -0.5])
    a = truncated_svd(b - c, 1)
    print("\nB = I, C = diag(0, -0.5), r = 1 -> A =", np.diag(a).tolist())
    print(f"||A||^2 = {np.sum(a * a):.2f} vs ||B||^2 = {np.sum(b * b):.2f}; "
          f"||B - A||^2 = {np.sum((b - a) ** 2):.2f} vs 2||C||^2 = {2 * np.sum(c * c):.2f}")


if __name__ == "__main__":
    main()
