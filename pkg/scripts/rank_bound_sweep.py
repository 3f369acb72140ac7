"""Numerical ranks of TR unfoldings against the r_k * r_{k+d} bound."""

import argparse

import numpy as np

from hqtrc.synth import numerical_rank, tensor_from_cores
from hqtrc.tensor import tr_unfold


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--instances", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    r = np.random.default_rng(args.seed)
    tight = violations = total = 0
    for _ in range(args.instances):
        n = int(r.integers(3, 6))
        dims = [int(v) for v in r.integers(2, 7, size=n)]
        ranks = [int(v) for v in r.integers(1, 4, size=n)]
        x = tensor_from_cores([r.standard_normal((ranks[i], dims[i], ranks[(i + 1) % n])) for i in range(n)])
        for k in range(1, n + 1):
            for d in range(1, n):
                rows = int(np.prod([dims[(k - 1 + j) % n] for j in range(d)]))
                bound = min(ranks[k - 1] * ranks[(k - 1 + d) % n], rows, x.size // rows)
                rk = numerical_rank(tr_unfold(x, k, d))
                total += 1
                violations += rk > bound
                tight += rk == bound
    print(f"unfoldings {total}, violations {violations}, bound attained {tight} ({tight / total:.1%})")


if __name__ == "__main__":
    main()
