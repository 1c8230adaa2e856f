"""How often does a lemniscate swallow a fixed disk?

Zeros are drawn uniformly from the disk of radius 0.5. The potential of that
measure is negative on the whole unit disk, so {|p_n| < 1} should contain
D(0, 0.8) with probability tending to one. Each trial is a rigorous
certificate, not a picture.

    python demos/containment.py [--trials 100]
"""
import argparse

from lemni import experiments
from lemni.measures import UniformDisk, potential


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    m = UniformDisk(0.5)
    for z in (0, 0.4, 0.8):
        print(f"U({z}) = {potential(m, z).value:+.4f}")

    cfg = experiments.ExperimentConfig("containment", "disk:0.5", [10, 30, 60, 120, 240],
                                       args.trials, master_seed=args.seed,
                                       params={"radius": 0.8})
    s = experiments.run(cfg)
    print("\n   n  frequency  wilson 95%")
    for row in s["per_n"]:
        lo, hi = row["wilson"]
        print(f"{row['n']:4d}  {row['frequency']:9.3f}  [{lo:.3f}, {hi:.3f}]")
    print("\nnondecreasing within CI:", experiments.nondecreasing_within_ci(s["per_n"]))


if __name__ == "__main__":
    main()
