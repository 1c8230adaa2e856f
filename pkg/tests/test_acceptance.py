"""End-to-end acceptance checks, one test per criterion.

Each test prints a single PASS/FAIL line (collected again in the terminal
summary) and then asserts the same verdict. Runtime limits are part of the
verdict.
"""
import math
import re
import time

import numpy as np
from scipy import optimize, stats

from lemni import cli, concentration, experiments, gaussian_limit
from lemni.ginibre import eigenvalues, sample_ginibre_matrix, sample_kostlan_moduli
from lemni.measures import UniformDisk, negative_set_inradius, potential, potential_mc
from lemni.polynomial import certify_disk, parse_zeros
from lemni.raster import Box, Raster, distance_transform, inradius_estimate, rasterize

SQRT2 = math.sqrt(2)


def test_criterion_01_closed_form_potential(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    agree = 0
    for k in range(100):
        r = rng.uniform(0.3, 2.0)
        z = 3 * math.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
        m = UniformDisk(r)
        mc = potential_mc(m, z, M=100_000, seed=rng)
        agree += abs(potential(m, z).value - mc.value) <= 4 * mc.stderr
    dt = time.perf_counter() - t0
    ok = agree >= 95 and dt < 30
    assert report(1, ok, f"{agree}/100 pairs within 4 stderr, {dt:.1f}s (need >= 95, < 30s)")


def test_criterion_02_rc_formula(report):
    t0 = time.perf_counter()
    worst = 0.0
    for r in np.linspace(1.0, math.sqrt(math.e), 100):
        U = lambda a: (a * a - r * r) / (2 * r * r) + math.log(r)
        if r >= math.sqrt(math.e):
            oracle = 0.0
        elif U(0.0) >= 0:
            oracle = 0.0
        else:
            oracle = optimize.brentq(U, 0.0, r, xtol=1e-15)
        worst = max(worst, abs(negative_set_inradius(UniformDisk(r)) - oracle))
    exact = (negative_set_inradius(UniformDisk(0.5)) == 1.0
             and negative_set_inradius(UniformDisk(math.sqrt(math.e))) == 0.0)
    dt = time.perf_counter() - t0
    ok = worst <= 1e-8 and exact and dt < 5
    assert report(2, ok, f"max |r_c - bisection| = {worst:.2e}, exact endpoints {exact}, {dt:.2f}s")


def _grid_product_max(X, c, a, m=2000):
    """max of prod |z - X_k|^2 over a 2000 x 2000 grid of the closed disk D(c, a)."""
    t = np.linspace(-a, a, m)
    x = c.real + t
    y = c.imag + t
    inside = (t[None, :] ** 2 + t[:, None] ** 2) <= a * a
    prod = np.ones((m, m))
    for w in X:
        prod *= ((x - w.real) ** 2)[None, :] + ((y - w.imag) ** 2)[:, None]
    return prod[inside].max()


def test_criterion_03_certification_soundness(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(303)
    cases = violations = attempts = 0
    while cases < 100:
        attempts += 1
        n = int(rng.integers(3, 31))
        rad = rng.uniform(0.3, 1.2)
        X = rad * np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))
        c = complex(*rng.uniform(-0.4, 0.4, 2))
        a = float(rng.uniform(0.05, 1.0))
        if not certify_disk(X, c, a).inside:
            continue
        cases += 1
        violations += _grid_product_max(X, c, a) >= 1.0
    dt = time.perf_counter() - t0
    ok = violations == 0 and dt < 120
    assert report(3, ok, f"{violations} violations in {cases} certified disks "
                         f"({attempts} attempts), {dt:.1f}s")


def test_criterion_04_containment(report):
    t0 = time.perf_counter()
    cfg = experiments.ExperimentConfig("containment", "disk:0.5", [30, 60, 120, 240], 100,
                                       master_seed=404, params={"radius": 0.8})
    s = experiments.run(cfg)
    dt = time.perf_counter() - t0
    freqs = [r["frequency"] for r in s["per_n"]]
    mono = experiments.nondecreasing_within_ci(s["per_n"])
    ok = freqs[-1] >= 0.95 and mono and dt < 180
    assert report(4, ok, f"frequencies {freqs}, nondecreasing within CI {mono}, {dt:.1f}s")


def test_criterion_05_small_components(report):
    t0 = time.perf_counter()
    cfg = experiments.ExperimentConfig("small_components", "disk:1.7", [100], 50, h=0.003,
                                       master_seed=505)
    row = experiments.run(cfg)["per_n"][0]
    dt = time.perf_counter() - t0
    med = row["median_rho_hat"]
    frac = row["pooled_fraction_near_zero"]
    ok = med <= 0.05 and frac >= 0.99 and dt < 240
    assert report(5, ok, f"median rho_hat {med:.4f} (<= 0.05), occupied cells within 3h of a zero "
                         f"{frac:.4f} (>= 0.99), {dt:.1f}s")


def test_criterion_06_inradius_distribution(report):
    t0 = time.perf_counter()
    h = 0.005
    cfg = experiments.ExperimentConfig("inradius_distribution", "circle", [400], 300, h=h,
                                       master_seed=606)
    row = experiments.run(cfg)["per_n"][0]
    dt = time.perf_counter() - t0
    upper = 0.5 + 2 * h * SQRT2
    ok = row["all_in_range"] and row["std"] > 0.02 and row["ks_statistic"] <= 0.15 and dt < 300
    assert report(6, ok, f"range [{row['min']:.3f}, {row['max']:.3f}] vs (0, {upper:.3f}) "
                         f"({row['count_above_upper']} above), std {row['std']:.4f}, "
                         f"KS {row['ks_statistic']:.3f} (<= 0.15), {dt:.1f}s")


def test_criterion_07_kernel_identity(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(707)
    zs = rng.uniform(0, 0.9, 10) * np.exp(2j * np.pi * rng.random(10))
    ws = rng.uniform(0, 0.9, 10) * np.exp(2j * np.pi * rng.random(10))
    worst = max(abs(gaussian_limit.covariance_series(z, w, 10_000)[0]
                    - gaussian_limit.covariance_quadrature(z, w, 2 ** 16))
                for z in zs for w in ws)
    dt = time.perf_counter() - t0
    ok = worst <= 1e-8 and dt < 10
    assert report(7, ok, f"max |series - quadrature| = {worst:.2e} on 10x10 grid, {dt:.2f}s")


def test_criterion_08_ginibre_sandwich(report):
    t0 = time.perf_counter()
    cfg = experiments.ExperimentConfig("ginibre_sandwich", "ginibre", [100], 50, master_seed=808,
                                       params={"r": 0.8, "s": 1.2})
    row = experiments.run(cfg)["per_n"][0]
    dt = time.perf_counter() - t0
    ok = row["frequency"] >= 0.9 and dt < 240
    assert report(8, ok, f"joint frequency {row['frequency']:.2f} (>= 0.9), {dt:.1f}s")


def test_criterion_09_kostlan(report):
    t0 = time.perf_counter()
    sums = np.array([np.sum(np.abs(eigenvalues(sample_ginibre_matrix(50, 9000 + k)).zeros) ** 2)
                     for k in range(200)])
    se = sums.std(ddof=1) / math.sqrt(sums.size)
    z = abs(sums.mean() - 1275) / se
    ev = np.concatenate([np.abs(eigenvalues(sample_ginibre_matrix(30, 19000 + k)).zeros) ** 2
                         for k in range(500)])
    ky = np.concatenate([sample_kostlan_moduli(30, 29000 + k) for k in range(500)])
    ks = stats.ks_2samp(ev, ky).statistic
    dt = time.perf_counter() - t0
    ok = z <= 4 and ks <= 0.05 and dt < 120
    assert report(9, ok, f"mean sum|lambda|^2 = {sums.mean():.1f} ({z:.2f} SE from 1275), "
                         f"KS {ks:.4f} (<= 0.05), {dt:.1f}s")


def test_criterion_10_bennett(report):
    t0 = time.perf_counter()
    rows = concentration.bounded_iid_check(n=100, trials=100_000, seed=1010)
    rep = concentration.verify_containment_bound(UniformDisk(1), 0, 50, 10_000, seed=1011)
    dt = time.perf_counter() - t0
    synth = all(r["pass"] for r in rows)
    ok = synth and rep["pass"] and dt < 60
    assert report(10, ok, f"synthetic tails ok {synth} at t=2,5,10,20; containment empirical "
                          f"{rep['empirical']:.2e} vs bound {rep['bound']:.2e}, {dt:.1f}s")


def test_criterion_11_inradius_estimator(report):
    t0 = time.perf_counter()
    h = 0.005
    est = inradius_estimate(rasterize(parse_zeros("origin:1"), (-1.5, 1.5, -1.5, 1.5), h))
    disk_ok = abs(est.rho_hat - 1) <= 2 * h * SQRT2
    rng = np.random.default_rng(1111)
    exact = True
    for _ in range(5):
        occ = rng.random((50, 50)) < rng.uniform(0.5, 0.95)
        r = Raster(Box(0, 5, 0, 5), 0.1, occ)
        dt_fast = distance_transform(r)
        pts = r.cell_centers()
        free = pts[~occ]
        for j, i in zip(*np.nonzero(occ)):
            z = pts[j, i]
            d = min(np.min(np.abs(free - z)) if free.size else np.inf,
                    z.real, 5 - z.real, z.imag, 5 - z.imag)
            exact &= abs(dt_fast[j, i] - d) <= 1e-12
    dt = time.perf_counter() - t0
    ok = disk_ok and exact and dt < 30
    assert report(11, ok, f"unit disk rho_hat {est.rho_hat:.5f} (|err| <= {2 * h * SQRT2:.4f}), "
                          f"DT exact on 5 random 50x50 rasters {bool(exact)}, {dt:.1f}s")


def _figure_components(tmp_path, measure, n, seed, capsys):
    out = tmp_path / f"{measure}_{n}_{seed}.svg"
    code = cli.main(["figure", "--measure", measure, "--n", str(n), "--seed", str(seed),
                     "--out", str(out)])
    text = capsys.readouterr().out
    assert code == 0 and out.read_text().startswith("<?xml")
    return int(re.search(r"components=(\d+)", text).group(1)), out.read_text()


def test_criterion_12_figures(report, tmp_path, capsys):
    t0 = time.perf_counter()
    one = sum(_figure_components(tmp_path, "disk:0.5", 30, s, capsys)[0] == 1 for s in range(20))
    many = sum(_figure_components(tmp_path, "disk:1.7", 15, s, capsys)[0] >= 5 for s in range(20))
    gin, svg = _figure_components(tmp_path, "ginibre", 100, 1, capsys)
    dt = time.perf_counter() - t0
    ok = one >= 16 and many >= 16 and gin == 1 and dt < 60
    assert report(12, ok, f"r=0.5: one component in {one}/20; r=1.7: >= 5 components in {many}/20; "
                          f"ginibre components {gin}, {dt:.1f}s")
