"""Three pictures: a blob, dust, and a disk-shaped lemniscate.

Writes SVGs to the output directory and reports the component count of each.
"""
import argparse
from pathlib import Path

from lemni import contour
from lemni.measures import parse_measure, sample

CASES = (("disk:0.5", 30), ("disk:1.7", 15), ("ginibre", 100))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="figures")
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for spec, n in CASES:
        m = parse_measure(spec)
        fig = contour.figure(sample(m, n, args.seed), m)
        path = out / f"{spec.replace(':', '')}_n{n}.svg"
        path.write_text(fig.svg)
        print(f"{path}: components={fig.components} r_c={fig.rc:g}")


if __name__ == "__main__":
    main()
