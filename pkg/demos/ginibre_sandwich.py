"""Ginibre eigenvalues, scaled by 1/sqrt(n), fill the unit disk uniformly.

The characteristic polynomial's lemniscate then sits between two circles:
it contains D(0, r) and no zero lies outside D(0, s) whenever r < 1 < s and n
is large. Both sides are checked rigorously, the outer one by a positive
lower bound for log|p_n| on the circle of radius s.
"""
import argparse

import numpy as np

from lemni import experiments
from lemni.ginibre import eigenvalues, sample_ginibre_matrix


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=30)
    ap.add_argument("--seed", type=int, default=4)
    args = ap.parse_args()

    n = 50
    sums = [np.sum(np.abs(eigenvalues(sample_ginibre_matrix(n, k)).zeros) ** 2) for k in range(100)]
    print(f"mean sum |lambda|^2 at n={n}: {np.mean(sums):.1f} (exact {n * (n + 1) // 2})")

    for r, s in ((0.8, 1.2), (0.9, 1.1)):
        cfg = experiments.ExperimentConfig("ginibre_sandwich", "ginibre", [25, 50, 100],
                                           args.trials, master_seed=args.seed,
                                           params={"r": r, "s": s})
        print(f"\nr={r} s={s}")
        for row in experiments.run(cfg)["per_n"]:
            print(f"  n={row['n']:4d}  frequency {row['frequency']:.2f}")


if __name__ == "__main__":
    main()
