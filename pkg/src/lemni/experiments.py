"""Seeded Monte Carlo campaigns over random lemniscates.

Each trial draws its own generator from ``derive_seed(master, kind, n, trial)``
so any single trial can be replayed in isolation. Results are sorted by
(n, trial_index) before they are summarized, which keeps outputs identical
whether trials ran serially or in a process pool.
"""
from __future__ import annotations

import csv
import json
import logging
import math
import os
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from . import concentration, gaussian_limit
from .measures import (
    GinibreNormalized,
    UniformCircle,
    UniformDisk,
    distance_to_support,
    negative_set_inradius,
    parse_measure,
    potential_array,
    sample,
)
from .polynomial import certify_circle_positive, certify_disk
from .raster import (
    Box,
    connected_components,
    default_box,
    distance_transform,
    inradius_estimate,
    raster_contains_disk,
    rasterize,
)

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
KINDS = ("containment", "exclusion", "inradius_distribution", "ginibre_sandwich",
         "small_components", "bennett_check", "limit_comparison")
MASK64 = (1 << 64) - 1


class PreconditionError(ValueError):
    """The requested target violates the hypotheses the experiment relies on."""


@dataclass
class ExperimentConfig:
    kind: str
    measure: object
    n_values: list
    trials: int
    h: float = 0.005
    box: tuple | None = None
    master_seed: int = 0
    output_path: str | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if isinstance(self.measure, str):
            self.measure = parse_measure(self.measure)
        self.n_values = [int(n) for n in self.n_values]
        if not self.n_values or any(b <= a for a, b in zip(self.n_values, self.n_values[1:])):
            raise ValueError("n_values must be nonempty and strictly increasing")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.box is not None:
            self.box = tuple(float(v) for v in self.box)
        self.master_seed = int(self.master_seed) & MASK64

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "measure": str(self.measure),
            "n_values": list(self.n_values),
            "trials": self.trials,
            "h": self.h,
            "box": list(self.box) if self.box is not None else None,
            "master_seed": self.master_seed,
            "output_path": self.output_path,
            "params": self.params,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        return cls(**d)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass
class TrialRecord:
    n: int
    trial_index: int
    derived_seed: int
    rho_hat: float = math.nan
    flags: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)
    wall_time: float = 0.0


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def derive_seed(master_seed: int, kind: str, n: int, trial_index: int) -> int:
    """64-bit seed for one trial: SplitMix64 folded over (master, kind, n, trial)."""
    s = _splitmix64(int(master_seed) & MASK64)
    for part in (zlib.crc32(kind.encode()), int(n), int(trial_index)):
        s = _splitmix64(s ^ (part & MASK64))
    return s


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054) -> tuple[float, float]:
    if trials <= 0:
        return 0.0, 1.0
    p = successes / trials
    denom = 1 + z * z / trials
    mid = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, mid - half), min(1.0, mid + half)


def nondecreasing_within_ci(rows: list[dict], key: str = "frequency", max_inversions: int = 1) -> bool:
    """Frequencies rise with n, except for at most ``max_inversions`` drops whose CIs overlap."""
    bad = 0
    for a, b in zip(rows, rows[1:]):
        if b[key] < a[key]:
            lo_a, _ = a["wilson"]
            _, hi_b = b["wilson"]
            if hi_b < lo_a:
                return False
            bad += 1
    return bad <= max_inversions


# ---------------------------------------------------------------- preconditions

def _probe_points(center: complex, radius: float, count: int = 32) -> np.ndarray:
    return center + radius * np.exp(2j * np.pi * np.arange(count) / count)


def check_containment_target(measure, center: complex, radius: float) -> None:
    rc = negative_set_inradius(measure)
    if not radius < rc:
        raise PreconditionError(f"target radius {radius} is not below r_c = {rc:.6g}")
    probes = _probe_points(center, radius)
    U = potential_array(measure, probes)
    bad = np.flatnonzero(~(U < 0))
    if bad.size:
        raise PreconditionError("potential is not negative at probes "
                                + ", ".join(f"{probes[k]:.4g}" for k in bad))


def check_exclusion_target(measure, center: complex, radius: float, delta: float) -> None:
    d = distance_to_support(measure, center, radius)
    if not d >= delta:
        raise PreconditionError(f"probe circle is {d:.4g} from the support, need >= {delta}")
    probes = _probe_points(center, radius)
    U = potential_array(measure, probes)
    bad = np.flatnonzero(~(U > 0))
    if bad.size:
        raise PreconditionError("potential is not positive at probes "
                                + ", ".join(f"{probes[k]:.4g}" for k in bad))


# ---------------------------------------------------------------- trials

def _zeros(cfg: ExperimentConfig, n: int, seed: int):
    return sample(cfg.measure, n, seed)


def _complex_param(p, default):
    if p is None:
        return complex(default)
    if isinstance(p, (list, tuple)):
        return complex(p[0], p[1])
    return complex(p)


def _trial_containment(cfg, n, seed):
    p = cfg.params
    c = _complex_param(p.get("center"), 0)
    a = float(p["radius"])
    Z = _zeros(cfg, n, seed)
    cert = certify_disk(Z, c, a)
    flags = {"certified_inside": cert.inside}
    if p.get("grid_check"):
        box = Box.square(a + 4 * cfg.h, c)
        box = Box(*(round(v / cfg.h) * cfg.h for v in box.as_tuple()))
        flags["raster_contains_disk"] = raster_contains_disk(rasterize(Z, box, cfg.h), c, a)
    return {"flags": flags, "stats": {"net_size": cert.net_size}}


def _trial_exclusion(cfg, n, seed):
    p = cfg.params
    c = _complex_param(p.get("center"), 0)
    s = float(p["radius"])
    Z = _zeros(cfg, n, seed)
    res = certify_circle_positive(Z, c, s)
    return {"flags": {"excluded": res.verdict == "certified_positive"},
            "stats": {"net_size": res.net_size}}


def _inradius_box(cfg) -> Box:
    if cfg.box is not None:
        return Box(*cfg.box)
    return Box.square(2.0)


def _trial_inradius(cfg, n, seed):
    Z = _zeros(cfg, n, seed)
    est = inradius_estimate(rasterize(Z, _inradius_box(cfg), cfg.h))
    return {"rho_hat": est.rho_hat,
            "stats": {"center_x": float(est.center.real), "center_y": float(est.center.imag)}}


def _trial_sandwich(cfg, n, seed):
    p = cfg.params
    r = float(p.get("r", 0.8))
    s = float(p.get("s", 1.2))
    Z = _zeros(cfg, n, seed)
    inner = certify_disk(Z, 0j, r).inside
    no_zero_outside = bool(np.all(np.abs(Z.zeros) < s))
    circle_ok = no_zero_outside and certify_circle_positive(Z, 0j, s).verdict == "certified_positive"
    # grid over the annulus s <= |z| <= R + 1, R covering every zero
    box = default_box(Z, cfg.measure, cfg.h)
    ras = rasterize(Z, box, cfg.h)
    pts = ras.cell_centers()
    grid_ok = not bool(np.any(ras.occupancy & (np.abs(pts) >= s)))
    outer = no_zero_outside and circle_ok and grid_ok
    return {"flags": {"inner_certified": inner, "no_zero_outside": no_zero_outside,
                      "circle_certified": circle_ok, "annulus_grid_empty": grid_ok,
                      "sandwich": inner and outer}}


def near_zero_mask(ras, zeros, eps: float) -> np.ndarray:
    """Cells whose centers lie within ``eps`` of some zero."""
    X = np.asarray(zeros)
    ny, nx = ras.occupancy.shape
    mask = np.zeros((ny, nx), dtype=bool)
    cx, cy = ras.cell_x(), ras.cell_y()
    k = int(math.ceil(eps / ras.h)) + 1
    b = ras.box
    for z in X:
        i = int(math.floor((z.real - b.xmin) / ras.h))
        j = int(math.floor((z.imag - b.ymin) / ras.h))
        i0, i1 = max(0, i - k), min(nx, i + k + 1)
        j0, j1 = max(0, j - k), min(ny, j + k + 1)
        if i0 >= i1 or j0 >= j1:
            continue
        d = np.hypot(cx[None, i0:i1] - z.real, cy[j0:j1, None] - z.imag)
        mask[j0:j1, i0:i1] |= d <= eps
    return mask


def refined_local_rho(zeros, h: float, factor: int = 10, cells: int = 1) -> float:
    """Largest inradius of {|p_n| < 1} seen on (factor x)-finer patches around each zero.

    Each patch covers the zero's cell and ``cells`` neighbors on every side,
    so the result is capped near (cells + 0.5) h; hitting the cap means the
    island reaches the patch edge.
    """
    X = np.asarray(zeros)
    fine = h / factor
    half = (cells + 0.5) * h
    best = 0.0
    for z in X:
        box = Box(z.real - half, z.real + half, z.imag - half, z.imag + half)
        best = max(best, inradius_estimate(rasterize(X, box, fine)).rho_hat)
    return best


def _trial_small(cfg, n, seed):
    Z = _zeros(cfg, n, seed)
    box = Box(*cfg.box) if cfg.box is not None else default_box(Z, cfg.measure, cfg.h)
    ras = rasterize(Z, box, cfg.h)
    est = inradius_estimate(ras, distance_transform(ras))
    eps = float(cfg.params.get("eps_cells", 3)) * cfg.h
    occ = ras.occupancy
    near = near_zero_mask(ras, Z.zeros, eps)
    n_occ = int(occ.sum())
    n_near = int((occ & near).sum())
    comps = connected_components(ras, Z)
    diam = [c.diameter for c in comps]
    out = {"rho_hat": est.rho_hat,
           "stats": {"occupied_cells": n_occ, "occupied_near_zero": n_near,
                     "fraction_near_zero": n_near / n_occ if n_occ else 1.0,
                     "components": len(comps),
                     "max_diameter": max(diam) if diam else 0.0,
                     "median_diameter": float(np.median(diam)) if diam else 0.0}}
    if cfg.params.get("refined_check", False):
        out["stats"]["refined_local_rho"] = refined_local_rho(Z.zeros, cfg.h)
    return out


_TRIALS = {
    "containment": _trial_containment,
    "exclusion": _trial_exclusion,
    "inradius_distribution": _trial_inradius,
    "ginibre_sandwich": _trial_sandwich,
    "small_components": _trial_small,
}


def run_trial(cfg: ExperimentConfig, n: int, trial_index: int) -> TrialRecord:
    """One trial, reproducible from (config, n, trial_index) alone."""
    seed = derive_seed(cfg.master_seed, cfg.kind, n, trial_index)
    t0 = time.perf_counter()
    res = _TRIALS[cfg.kind](cfg, n, seed)
    return TrialRecord(n, trial_index, seed, float(res.get("rho_hat", math.nan)),
                       res.get("flags", {}), res.get("stats", {}), time.perf_counter() - t0)


def _run_one(args):
    cfg_dict, n, t = args
    return run_trial(ExperimentConfig.from_dict(cfg_dict), n, t)


def resolve_threads(threads: int | None = None) -> int:
    if threads is None:
        threads = int(os.environ.get("LEMNI_THREADS", "1") or 1)
    return max(1, int(threads))


def run_trials(cfg: ExperimentConfig, threads: int | None = None) -> list[TrialRecord]:
    work = [(n, t) for n in cfg.n_values for t in range(cfg.trials)]
    threads = resolve_threads(threads)
    if threads == 1 or len(work) < 2:
        recs = [run_trial(cfg, n, t) for n, t in work]
    else:
        d = cfg.to_dict()
        with ProcessPoolExecutor(max_workers=threads) as ex:
            recs = list(ex.map(_run_one, [(d, n, t) for n, t in work], chunksize=4))
    recs.sort(key=lambda r: (r.n, r.trial_index))
    return recs


def _frequency_rows(cfg, recs, flag):
    rows = []
    for n in cfg.n_values:
        sel = [r for r in recs if r.n == n]
        k = sum(bool(r.flags[flag]) for r in sel)
        rows.append({"n": n, "trials": len(sel), "successes": k,
                     "frequency": k / len(sel), "wilson": list(wilson_interval(k, len(sel)))})
    return rows


def _summary(cfg, recs, per_n, **extra):
    out = {"schema_version": SCHEMA_VERSION, "kind": cfg.kind, "config": cfg.to_dict(),
           "per_n": per_n, "records": recs}
    out.update(extra)
    return out


# ---------------------------------------------------------------- runners

def run_containment(cfg: ExperimentConfig, threads=None) -> dict:
    """Frequency with which the target disk is certified inside the lemniscate."""
    c = _complex_param(cfg.params.get("center"), 0)
    check_containment_target(cfg.measure, c, float(cfg.params["radius"]))
    recs = run_trials(cfg, threads)
    rows = _frequency_rows(cfg, recs, "certified_inside")
    if cfg.params.get("grid_check"):
        incoherent = sum(r.flags["certified_inside"] and not r.flags["raster_contains_disk"]
                         for r in recs)
        return _summary(cfg, recs, rows, incoherent_trials=int(incoherent))
    return _summary(cfg, recs, rows)


def run_exclusion(cfg: ExperimentConfig, threads=None) -> dict:
    """Frequency with which |p_n| > 1 is certified on a probe circle away from the support."""
    c = _complex_param(cfg.params.get("center"), 0)
    check_exclusion_target(cfg.measure, c, float(cfg.params["radius"]),
                           float(cfg.params.get("delta", 1e-3)))
    recs = run_trials(cfg, threads)
    return _summary(cfg, recs, _frequency_rows(cfg, recs, "excluded"))


def limit_samples(count: int, master_seed: int, K: int = 500, box_radius: float = 0.98,
                  h: float = 0.005) -> np.ndarray:
    return np.array([
        gaussian_limit.limit_inradius_sample(K, box_radius, h,
                                             seed=derive_seed(master_seed, "limit", K, i))
        for i in range(count)
    ])


def histogram_rows(samples, bins) -> list[dict]:
    counts, edges = np.histogram(samples, bins=bins)
    return [{"bin_left": float(a), "bin_right": float(b), "count": int(c)}
            for a, b, c in zip(edges[:-1], edges[1:], counts)]


def run_inradius_distribution(cfg: ExperimentConfig, threads=None) -> dict:
    """Samples of rho_n on the full box, compared with samples of the limit inradius."""
    if not isinstance(cfg.measure, UniformCircle):
        raise PreconditionError("the inradius distribution experiment uses circle zeros")
    recs = run_trials(cfg, threads)
    p = cfg.params
    lim = limit_samples(int(p.get("limit_samples", cfg.trials)), cfg.master_seed,
                        int(p.get("K", 500)), float(p.get("box_radius", 0.98)),
                        float(p.get("limit_h", cfg.h)))
    upper = 0.5 + 2 * cfg.h * math.sqrt(2)
    bins = np.linspace(0, 0.6, 25)
    rows = []
    for n in cfg.n_values:
        x = np.array([r.rho_hat for r in recs if r.n == n])
        ks = stats.ks_2samp(x, lim)
        rows.append({
            "n": n, "trials": int(x.size), "mean": float(x.mean()),
            "std": float(x.std(ddof=1)) if x.size > 1 else 0.0,
            "min": float(x.min()), "max": float(x.max()),
            "all_in_range": bool(np.all((x > 0) & (x < upper))),
            "count_above_upper": int(np.sum(x >= upper)),
            "ks_statistic": float(ks.statistic), "ks_pvalue": float(ks.pvalue),
            "histogram": histogram_rows(x, bins),
        })
    return _summary(cfg, recs, rows, upper=upper, limit_samples=lim.tolist(),
                    limit_histogram=histogram_rows(lim, bins))


def run_ginibre_sandwich(cfg: ExperimentConfig, threads=None) -> dict:
    """Frequency of D(0, r) certified inside and the lemniscate confined to D(0, s)."""
    if not isinstance(cfg.measure, GinibreNormalized):
        raise PreconditionError("the sandwich experiment uses Ginibre spectra")
    recs = run_trials(cfg, threads)
    return _summary(cfg, recs, _frequency_rows(cfg, recs, "sandwich"))


def run_small_components(cfg: ExperimentConfig, threads=None) -> dict:
    """Inradius and localization near zeros when the potential is nonnegative."""
    if isinstance(cfg.measure, UniformDisk) and cfg.measure.radius < math.sqrt(math.e):
        raise PreconditionError("small components need a disk radius >= sqrt(e)")
    recs = run_trials(cfg, threads)
    rows = []
    for n in cfg.n_values:
        sel = [r for r in recs if r.n == n]
        occ = sum(r.stats["occupied_cells"] for r in sel)
        near = sum(r.stats["occupied_near_zero"] for r in sel)
        row = {"n": n, "trials": len(sel),
               "median_rho_hat": float(np.median([r.rho_hat for r in sel])),
               "pooled_fraction_near_zero": near / occ if occ else 1.0,
               "min_fraction_near_zero": min(r.stats["fraction_near_zero"] for r in sel),
               "max_diameter": max(r.stats["max_diameter"] for r in sel)}
        if "refined_local_rho" in sel[0].stats:
            row["max_refined_local_rho"] = max(r.stats["refined_local_rho"] for r in sel)
        rows.append(row)
    return _summary(cfg, recs, rows)


def run_bennett_check(cfg: ExperimentConfig, threads=None) -> dict:
    """Empirical tail of log|p_n(z)| > -log 2 against the Bennett bound, per n."""
    z = _complex_param(cfg.params.get("z"), 0)
    rows = []
    for n in cfg.n_values:
        rep = concentration.verify_containment_bound(
            cfg.measure, z, n, cfg.trials, seed=derive_seed(cfg.master_seed, cfg.kind, n, 0))
        rows.append({"n": n, **rep})
    return _summary(cfg, [], rows)


def run_limit_comparison(cfg: ExperimentConfig, threads=None) -> dict:
    """KS distance between draws of g_n(z) and the normal law N(0, K(z, z))."""
    if not isinstance(cfg.measure, UniformCircle):
        raise PreconditionError("the limit comparison uses circle zeros")
    z = _complex_param(cfg.params.get("z"), 0.5)
    var = gaussian_limit.covariance_series(z, z, 10_000)[0]
    rows = []
    for n in cfg.n_values:
        rng = np.random.default_rng(derive_seed(cfg.master_seed, cfg.kind, n, 0))
        draws = np.empty(cfg.trials)
        batch = max(1, 400_000 // n)
        for s in range(0, cfg.trials, batch):
            m = min(batch, cfg.trials - s)
            X = np.exp(2j * np.pi * rng.random((m, n)))
            draws[s:s + m] = np.log(np.abs(1 - z * X.conj())).sum(axis=1) / math.sqrt(n)
        ks = stats.kstest(draws, "norm", args=(0.0, math.sqrt(var)))
        rows.append({"n": n, "trials": cfg.trials, "variance_target": var,
                     "sample_variance": float(draws.var(ddof=1)),
                     "ks_statistic": float(ks.statistic), "ks_pvalue": float(ks.pvalue)})
    return _summary(cfg, [], rows)


RUNNERS = {
    "containment": run_containment,
    "exclusion": run_exclusion,
    "inradius_distribution": run_inradius_distribution,
    "ginibre_sandwich": run_ginibre_sandwich,
    "small_components": run_small_components,
    "bennett_check": run_bennett_check,
    "limit_comparison": run_limit_comparison,
}


def run(cfg: ExperimentConfig, threads=None) -> dict:
    summary = RUNNERS[cfg.kind](cfg, threads)
    if cfg.output_path:
        persist(summary, cfg.output_path)
    return summary


# ---------------------------------------------------------------- persistence

def _jsonable(x):
    if isinstance(x, TrialRecord):
        return {"n": x.n, "trial_index": x.trial_index, "derived_seed": x.derived_seed,
                "rho_hat": _jsonable(x.rho_hat), "flags": _jsonable(x.flags),
                "stats": _jsonable(x.stats)}
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def _record_columns(recs):
    flags = sorted({k for r in recs for k in r.flags})
    stat = sorted({k for r in recs for k in r.stats})
    return flags, stat


def persist(summary: dict, path) -> dict:
    """Write the summary as JSON plus per-trial CSV and timing files next to it.

    Wall times live only in ``<stem>.timing.csv`` so the JSON and CSV are
    byte-identical across reruns of the same config.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    recs = summary.get("records", [])
    body = _jsonable({**summary, "schema_version": SCHEMA_VERSION})
    path.write_text(json.dumps(body, sort_keys=True, indent=2) + "\n")
    flags, stat = _record_columns(recs)
    with open(path.with_suffix(".csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "trial_index", "derived_seed", "rho_hat"] + flags + stat)
        for r in recs:
            w.writerow([r.n, r.trial_index, r.derived_seed, repr(float(r.rho_hat))]
                       + [int(bool(r.flags.get(k))) for k in flags]
                       + [repr(float(r.stats.get(k))) if isinstance(r.stats.get(k), float)
                          else r.stats.get(k, "") for k in stat])
    with open(path.with_name(path.stem + ".timing.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "trial_index", "wall_time"])
        for r in recs:
            w.writerow([r.n, r.trial_index, f"{r.wall_time:.6f}"])
    return body


def load_summary(path) -> dict:
    return json.loads(Path(path).read_text())


def write_histogram_csv(rows: list[dict], path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["bin_left", "bin_right", "count"])
        for r in rows:
            w.writerow([repr(r["bin_left"]), repr(r["bin_right"]), r["count"]])
