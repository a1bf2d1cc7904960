import io
import subprocess
import sys

import pytest

from percoplanar import analysis
from percoplanar.cli import run
from percoplanar.generators import complete_graph, hypercube, random_regular
from percoplanar.graph import read_edge_list, write_edge_list
from percoplanar.harness import format_csv, parse_config, run_sweep
from percoplanar.percolation import SampleParams, percolate
from percoplanar.planarity import density_certificate, format_certificate, parse_certificate


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def k5_file(tmp_path):
    path = tmp_path / "k5.txt"
    write_edge_list(complete_graph(5), path)
    return path


def test_generate_matches_module(tmp_path):
    path = tmp_path / "rr.txt"
    code, out, _ = call("generate", "--family", "random_regular", "--n", 60, "--r", 4,
                        "--seed", 9, "--out", path)
    assert code == 0 and out.strip() == "n=60 m=120 min_degree=4 max_degree=4"
    assert read_edge_list(path) == random_regular(60, 4, 9)


def test_percolate_matches_module(tmp_path):
    src, dst = tmp_path / "q.txt", tmp_path / "s.txt"
    write_edge_list(hypercube(6), src)
    code, _, _ = call("percolate", src, "--p", 0.4, "--seed", 2, "--out", dst)
    assert code == 0
    assert read_edge_list(dst) == percolate(hypercube(6), SampleParams(0.4, 2))
    call("percolate", src, "--p", 1.0, "--out", dst)
    assert dst.read_bytes() == src.read_bytes()


def test_env_seed(tmp_path, monkeypatch):
    src = tmp_path / "q.txt"
    write_edge_list(hypercube(6), src)
    monkeypatch.setenv("PERCOPLANAR_SEED", "5")
    call("percolate", src, "--p", 0.4, "--out", tmp_path / "a.txt")
    call("percolate", src, "--p", 0.4, "--seed", 5, "--out", tmp_path / "b.txt")
    assert (tmp_path / "a.txt").read_bytes() == (tmp_path / "b.txt").read_bytes()
    monkeypatch.setenv("PERCOPLANAR_SEED", "five")
    assert call("percolate", src, "--p", 0.4, "--out", tmp_path / "c.txt")[0] == 1


def test_planar(k5_file, tmp_path):
    assert call("planar", k5_file)[:2] == (0, "non-planar\n")
    grid_file = tmp_path / "q3.txt"
    write_edge_list(hypercube(3), grid_file)
    assert call("planar", grid_file)[:2] == (0, "planar\n")


def test_certify(k5_file, tmp_path):
    dest = tmp_path / "cert.txt"
    code, out, _ = call("certify", k5_file, "--ell", 3, "--out", dest)
    assert code == 0
    assert out == format_certificate(density_certificate(complete_graph(5), 3))
    assert dest.read_text() == out
    assert parse_certificate(out).m_prime == 10
    q3 = tmp_path / "q3.txt"
    write_edge_list(hypercube(3), q3)
    assert call("certify", q3)[1] == "no-certificate\n"


def test_witness_on_family():
    code, out, _ = call("witness", "--family", "random_regular", "--n", 600, "--r", 8,
                        "--epsilon", 0.8, "--seed", 1)
    assert code == 0
    assert out.startswith("outcome=") and "p1=" in out
    code, _, err = call("witness", "--epsilon", 0.5)
    assert code == 1 and "either a graph file or --family" in err


def test_sweep_matches_harness(tmp_path):
    cfg_text = "family = complete\nn = 12\nseed = 4\nmode = oracle\n[grid]\np=0.3 trials=6\n"
    cfg = tmp_path / "s.cfg"
    cfg.write_text(cfg_text)
    out_csv, summary = tmp_path / "r.csv", tmp_path / "sum.csv"
    code, out, _ = call("sweep", "--config", cfg, "--out", out_csv, "--summary-out", summary)
    assert code == 0 and "P(planar)" in out
    expected = format_csv(run_sweep(parse_config(cfg_text)))
    assert out_csv.read_text() == expected
    assert summary.read_text().startswith("grid_index,")
    # a flag overrides the config value
    call("sweep", "--config", cfg, "--out", out_csv, "--trials", 2)
    assert len(out_csv.read_text().splitlines()) == 3


def test_sweep_from_flags(tmp_path):
    out_csv = tmp_path / "r.csv"
    code, _, _ = call("sweep", "--family", "hypercube", "--d", 4, "--p", 0.5, "--trials", 3,
                      "--mode", "oracle", "--out", out_csv)
    assert code == 0 and len(out_csv.read_text().splitlines()) == 4


def test_sweep_errors(tmp_path):
    assert call("sweep", "--family", "hypercube", "--d", 4, "--p", 0.5)[0] == 1  # no --out
    bad = tmp_path / "bad.cfg"
    bad.write_text("family = complete\nmystery = 1\n")
    assert call("sweep", "--config", bad, "--out", tmp_path / "x.csv")[0] == 1
    assert call("sweep", "--config", tmp_path / "none.cfg", "--out", tmp_path / "x.csv")[0] == 2


def test_analyze():
    code, out, _ = call("analyze", "--fixed-point", 2.0)
    assert code == 0 and out == "x = 0.7968121300\n"
    code, out, _ = call("analyze", "--c", 1.5, "--n", 1000, "--g0", 5)
    assert f"{analysis.giant_fixed_point(1.5):.10f}" in out
    assert "expected = 1.9546875" in out
    assert call("analyze", "--c", 1.5, "--g0", 2)[0] == 1
    assert call("analyze")[0] == 1


def test_exit_codes(tmp_path, k5_file):
    code, _, err = call("frobnicate")
    assert code == 1 and "usage" in err
    assert call("planar", tmp_path / "missing.txt")[0] == 2
    assert call("percolate", k5_file, "--p", 0.5, "--out", tmp_path / "no" / "x.txt")[0] == 2
    assert call("percolate", k5_file, "--p", 1.5, "--out", tmp_path / "x.txt")[0] == 1
    garbage = tmp_path / "g.txt"
    garbage.write_text("3 1\n0 x\n")
    assert call("planar", garbage)[0] == 1
    assert call("generate", "--family", "random_regular", "--n", 5, "--r", 3,
                "--out", tmp_path / "x.txt")[0] == 1


def test_console_entry_point(k5_file):
    proc = subprocess.run([sys.executable, "-m", "percoplanar.cli", "planar", str(k5_file)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "non-planar\n"
