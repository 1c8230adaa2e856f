import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from lemni import contour, measures, polynomial, raster
from lemni.cli import main, parse_complex

GOLDEN = Path(__file__).parent / "golden"


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("argv,golden", [
    (["potential", "--measure", "disk:1", "--z", "0"], "potential_disk1_z0.txt"),
    (["inradius", "--zeros", "roots-of-unity:20", "--h", "0.002"], "inradius_rou20.txt"),
    (["certify", "--zeros", "origin:3", "--radius", "0.9"], "certify_origin3.txt"),
    (["sample", "--measure", "disk:1", "--n", "5", "--seed", "1"], "sample_disk1_n5_s1.txt"),
    (["limit-field", "--seed", "3"], "limit_field_s3.txt"),
])
def test_golden_stdout(capsys, argv, golden):
    code, out, _ = run_cli(capsys, *argv)
    assert code == 0
    assert out == (GOLDEN / golden).read_text()


def test_potential_prints_minus_half(capsys):
    assert run_cli(capsys, "potential", "--measure", "disk:1", "--z", "0")[1].strip() == "-0.5"


def test_figure_golden(capsys, tmp_path):
    out = tmp_path / "fig.svg"
    code, text, _ = run_cli(capsys, "figure", "--measure", "disk:1.7", "--n", "15", "--seed", "7",
                            "--out", str(out))
    assert code == 0
    assert out.read_text() == (GOLDEN / "figure_disk17_n15_s7.svg").read_text()
    assert text == (GOLDEN / "figure_disk17_n15_s7.txt").read_text()
    svg = out.read_text()
    assert svg.count('class="contour"') >= 2
    assert "overlay dotted" not in svg  # r_c(1.7) = 0 suppresses the r_c circle


def test_figure_is_thin_shell(capsys, tmp_path):
    out = tmp_path / "f.svg"
    run_cli(capsys, "figure", "--measure", "disk:0.5", "--n", "10", "--seed", "2", "--out", str(out))
    m = measures.UniformDisk(0.5)
    assert out.read_text() == contour.figure(measures.sample(m, 10, 2), m).svg


def test_inradius_against_grid_oracle(capsys):
    _, out, _ = run_cli(capsys, "inradius", "--zeros", "roots-of-unity:20", "--h", "0.002")
    rho = float(out.split()[0].split("=")[1])
    Z = polynomial.roots_of_unity(20)
    est = raster.inradius_estimate(raster.rasterize(Z, raster.default_box(Z, None, 0.002), 0.002))
    assert rho == pytest.approx(est.rho_hat, abs=1e-6)
    assert "+/- 0.00282843" in out


def test_lemniscate_writes_pgm_and_csv(capsys, tmp_path):
    pgm, csv = tmp_path / "r.pgm", tmp_path / "d.csv"
    code, out, _ = run_cli(capsys, "lemniscate", "--zeros", "origin:2", "--h", "0.05",
                           "--box", "-2", "2", "-2", "2", "--out", str(pgm), "--distance-csv", str(csv))
    assert code == 0 and "components=1" in out
    occ = raster.read_pgm(pgm)
    assert occ.shape == (80, 80)
    assert np.loadtxt(csv, delimiter=",").max() == pytest.approx(1.0, abs=0.08)


def test_experiment_subcommand(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"kind": "containment", "measure": "disk:0.5", "n_values": [20],
                               "trials": 3, "master_seed": 1, "params": {"radius": 0.5}}))
    out = tmp_path / "res" / "s.json"
    code, text, _ = run_cli(capsys, "experiment", "--config", str(cfg), "--out", str(out))
    assert code == 0
    assert json.loads(text)[0]["trials"] == 3
    assert json.loads(out.read_text())["schema_version"] == 1


def test_limit_field_histogram(capsys, tmp_path):
    hist = tmp_path / "h.csv"
    code, text, _ = run_cli(capsys, "limit-field", "--samples", "3", "--seed", "1", "--h", "0.01",
                            "--hist", str(hist))
    assert code == 0
    lines = hist.read_text().splitlines()
    assert lines[0] == "bin_left,bin_right,count"
    assert sum(int(l.split(",")[2]) for l in lines[1:]) == 3


def test_missing_seed_is_logged(capsys, caplog):
    code, out, err = run_cli(capsys, "sample", "--measure", "circle", "--n", "3")
    assert code == 0 and "generated seed" in (err + caplog.text)
    assert len(out.splitlines()) == 3


def test_usage_errors_exit_two(capsys):
    assert run_cli(capsys, "potential", "--measure", "disk:1", "--z", "0", "--bogus")[0] == 2
    assert run_cli(capsys, "nosuchcommand")[0] == 2
    code, _, err = run_cli(capsys, "certify", "--zeros", "origin:1")
    assert code == 2 and "usage" in err


def test_runtime_errors_exit_one(capsys):
    code, _, err = run_cli(capsys, "potential", "--measure", "square", "--z", "0")
    assert code == 1 and "error" in err
    assert run_cli(capsys, "inradius", "--h", "0.01")[0] == 1


@pytest.mark.parametrize("sub", ["sample", "potential", "lemniscate", "inradius", "certify",
                                 "experiment", "figure", "limit-field"])
def test_help_everywhere(capsys, sub):
    code, out, _ = run_cli(capsys, sub, "--help")
    assert code == 0 and "usage" in out


def test_parse_complex():
    assert parse_complex("0.5,0.2") == 0.5 + 0.2j
    assert parse_complex("1-2j") == 1 - 2j
    assert parse_complex("3") == 3


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "lemni", "potential", "--measure", "disk:2", "--z", "3"],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert float(r.stdout) == pytest.approx(math.log(3))
