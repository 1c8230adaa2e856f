"""Command-line front end: ``lemni <subcommand> ...``.

Exit codes: 0 success, 1 runtime error, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import contour, experiments, gaussian_limit, measures, polynomial, raster

log = logging.getLogger("lemni")


def parse_complex(text: str) -> complex:
    """Accepts ``0.5``, ``0.5+0.2j``, ``0.5,0.2``."""
    t = text.replace(" ", "")
    if "," in t:
        re_, im_ = t.split(",")
        return complex(float(re_), float(im_))
    return complex(t)


def _seed(args) -> int:
    if args.seed is None:
        args.seed = int(np.random.SeedSequence().entropy % (1 << 63))
        log.warning("no --seed given; using generated seed %d", args.seed)
    return args.seed


def _zeros(args):
    if args.zeros:
        return polynomial.parse_zeros(args.zeros)
    if args.measure and args.n:
        return measures.sample(measures.parse_measure(args.measure), args.n, _seed(args))
    raise ValueError("give --zeros, or --measure with --n")


def _box(args, Z):
    if args.box:
        return raster.Box(*args.box)
    m = measures.parse_measure(args.measure) if getattr(args, "measure", None) else None
    return raster.default_box(Z, m, args.h)


def _emit(text: str, out):
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_sample(args):
    Z = measures.sample(measures.parse_measure(args.measure), args.n, _seed(args))
    _emit("".join(f"{float(w.real)!r} {float(w.imag)!r}\n" for w in Z.zeros), args.out)


def cmd_potential(args):
    m = measures.parse_measure(args.measure)
    z = parse_complex(args.z)
    if args.mc:
        pv = measures.potential_mc(m, z, args.mc, _seed(args))
        print(f"{pv.value:.12g} +/- {pv.stderr:.3g}")
    else:
        print(f"{measures.potential(m, z).value:.12g}")


def cmd_lemniscate(args):
    Z = _zeros(args)
    ras = raster.rasterize(Z, _box(args, Z), args.h)
    if args.out:
        raster.write_pgm(ras, args.out)
    if args.distance_csv:
        raster.write_grid_csv(raster.distance_transform(ras), args.distance_csv)
    ny, nx = ras.shape
    print(f"grid {nx}x{ny} h={args.h:g} occupied={int(ras.occupancy.sum())} "
          f"components={raster.component_count(ras, Z)}")


def cmd_inradius(args):
    Z = _zeros(args)
    est = raster.inradius_estimate(raster.rasterize(Z, _box(args, Z), args.h))
    c = est.center
    print(f"rho_hat={est.rho_hat:.6g} +/- {est.half_cell_error:.6g} "
          f"center=({c.real:.6g}, {c.imag:.6g}) cells={est.grid_points_inside}")


def cmd_certify(args):
    Z = _zeros(args)
    cert = polynomial.certify_disk(Z, parse_complex(args.center), args.radius,
                                   max_points=args.max_points)
    print(json.dumps(cert.to_dict(), sort_keys=True))


def cmd_experiment(args):
    cfg = experiments.ExperimentConfig.load(args.config)
    if args.out:
        cfg.output_path = args.out
    summary = experiments.run(cfg, threads=args.threads)
    body = experiments._jsonable({k: v for k, v in summary.items() if k != "records"})
    print(json.dumps(body["per_n"], sort_keys=True, indent=2))


def cmd_figure(args):
    m = measures.parse_measure(args.measure)
    Z = measures.sample(m, args.n, _seed(args))
    fig = contour.figure(Z, m, args.h)
    _emit(fig.svg, args.out)
    rc = "nan" if math.isnan(fig.rc) else f"{fig.rc:.6g}"
    print(f"components={fig.components} r_c={rc}", file=sys.stderr if not args.out else sys.stdout)


def cmd_limit_field(args):
    seed = _seed(args)
    if args.samples > 1:
        vals = experiments.limit_samples(args.samples, seed, args.K, args.box_radius, args.h)
        if args.hist:
            rows = experiments.histogram_rows(vals, np.linspace(0, 0.6, 25))
            experiments.write_histogram_csv(rows, args.hist)
        print(f"samples={vals.size} mean={vals.mean():.6g} min={vals.min():.6g} max={vals.max():.6g}")
        return
    g = gaussian_limit.sample_g(args.K, seed)
    ras = gaussian_limit.field_raster(g, args.box_radius, args.h)
    if args.out:
        pts = ras.cell_centers()
        vals = np.full(pts.shape, np.nan)
        inside = np.abs(pts) < args.box_radius
        vals[inside] = gaussian_limit.evaluate_g(g, pts[inside])
        raster.write_grid_csv(vals, args.out)
    est = raster.inradius_estimate(ras)
    tail = gaussian_limit.truncation_tail_std(args.K, args.box_radius)
    print(f"rho={est.rho_hat:.6g} +/- {est.half_cell_error:.6g} tail_std={tail:.3g}")


def _zero_args(p):
    p.add_argument("--zeros", help="roots-of-unity:N | origin:N | file:PATH")
    p.add_argument("--measure", help="sample zeros instead: disk:R | circle | ginibre | file:PATH")
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lemni", description="Random polynomial lemniscates.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw zeros from a measure")
    p.add_argument("--measure", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("potential", help="logarithmic potential at a point")
    p.add_argument("--measure", required=True)
    p.add_argument("--z", required=True)
    p.add_argument("--mc", type=int, default=0, help="Monte Carlo sample count instead of closed form")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_potential)

    p = sub.add_parser("lemniscate", help="rasterize {|p| < 1} to PGM")
    _zero_args(p)
    p.add_argument("--h", type=float, default=0.005)
    p.add_argument("--box", type=float, nargs=4, metavar=("XMIN", "XMAX", "YMIN", "YMAX"))
    p.add_argument("--out", help="PGM path")
    p.add_argument("--distance-csv")
    p.set_defaults(func=cmd_lemniscate)

    p = sub.add_parser("inradius", help="inradius estimate of the lemniscate")
    _zero_args(p)
    p.add_argument("--h", type=float, default=0.005)
    p.add_argument("--box", type=float, nargs=4, metavar=("XMIN", "XMAX", "YMIN", "YMAX"))
    p.set_defaults(func=cmd_inradius)

    p = sub.add_parser("certify", help="certify a closed disk inside the lemniscate")
    _zero_args(p)
    p.add_argument("--center", default="0")
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--max-points", type=int, default=polynomial.MAX_NET)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("experiment", help="run an experiment from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="summary JSON path (CSV written alongside)")
    p.add_argument("--threads", type=int, help="worker processes (default: $LEMNI_THREADS or 1)")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("figure", help="SVG figure of a sampled lemniscate")
    p.add_argument("--measure", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--h", type=float, default=0.005)
    p.add_argument("--out")
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("limit-field", help="sample the limit Gaussian field and its negative-set inradius")
    p.add_argument("--K", type=int, default=500)
    p.add_argument("--seed", type=int)
    p.add_argument("--h", type=float, default=0.005)
    p.add_argument("--box-radius", type=float, default=0.98)
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--out", help="field snapshot CSV (single sample)")
    p.add_argument("--hist", help="histogram CSV (with --samples)")
    p.set_defaults(func=cmd_limit_field)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        args.func(args)
    except (ValueError, MemoryError, OSError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
