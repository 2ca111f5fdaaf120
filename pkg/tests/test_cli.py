import json
import subprocess
import sys

import numpy as np
import pytest

from sparse_cfar import DivergenceError
from sparse_cfar import cli
from sparse_cfar.fileio import read_vector

SMALL = ["--m", "48", "--n", "96", "--trials", "2", "--seed", "3"]


def run_cli(*args):
    return subprocess.run([sys.executable, "-m", "sparse_cfar.cli", *args],
                          capture_output=True, text=True)


def test_generate_then_solve(tmp_path):
    assert cli.main(["generate", "--m", "64", "--n", "128", "--k", "4", "--sigma", "0.02",
                     "--seed", "1", "--out-dir", str(tmp_path)]) == 0
    for name in ("A.mtx", "y.csv", "x_true.csv"):
        assert (tmp_path / name).exists()
    proc = run_cli("solve", "--matrix", str(tmp_path / "A.mtx"), "--y", str(tmp_path / "y.csv"),
                   "--x-true", str(tmp_path / "x_true.csv"), "--out", str(tmp_path / "x_hat.csv"))
    assert proc.returncode == 0, proc.stderr
    summary = json.loads(proc.stdout)
    assert summary["k_hat"] == 4 and summary["algorithm"] == "iar_cfar"
    x_hat = read_vector(tmp_path / "x_hat.csv", "x_hat")
    x_true = read_vector(tmp_path / "x_true.csv", "x")
    np.testing.assert_array_equal(np.flatnonzero(x_hat), np.flatnonzero(x_true))


def test_solve_plain_lasso(tmp_path):
    cli.main(["generate", "--m", "32", "--n", "64", "--k", "3", "--out-dir", str(tmp_path)])
    assert cli.main(["solve", "--matrix", str(tmp_path / "A.mtx"), "--y", str(tmp_path / "y.csv"),
                     "--algorithm", "lasso_admm"]) == 0


@pytest.mark.parametrize("experiment,extra", [
    ("fixed", []),
    ("snr", ["--snr-db", "10", "30"]),
    ("sparsity", ["--k", "2", "6"]),
])
def test_bench_writes_csv_and_config(tmp_path, experiment, extra):
    out = tmp_path / "r.csv"
    assert cli.main(["bench", experiment, *SMALL, *extra, "--out", str(out)]) == 0
    assert out.read_text().splitlines()[0].startswith("row_type,block,m,n,k")
    config = json.loads(out.with_suffix(".json").read_text())
    assert config["experiment"] == experiment and config["m"] == 48


def test_bench_stdout(capsys):
    assert cli.main(["bench", "fixed", *SMALL]) == 0
    assert capsys.readouterr().out.startswith("row_type,")


def test_usage_errors(tmp_path):
    assert run_cli("bench", "fixed", "--m", "nope").returncode == 2
    assert run_cli("bench").returncode == 2
    assert cli.main(["bench", "fixed", *SMALL, "--k", "2", "3"]) == 2
    assert cli.main(["bench", "snr", *SMALL, "--sigma", "0.1", "--snr-db", "10"]) == 2
    assert cli.main(["bench", "fixed", *SMALL, "--pfa", "1.5"]) == 2
    assert cli.main(["bench", "fixed", *SMALL, "--alpha", "2.5"]) == 2
    assert cli.main(["solve", "--matrix", str(tmp_path / "missing.mtx"), "--y", "y.csv"]) == 2


def test_divergence_exit_status(monkeypatch):
    def diverge(*a, **k):
        raise DivergenceError(7)

    monkeypatch.setattr(cli.bench, "run_fixed_sparsity", diverge)
    assert cli.main(["bench", "fixed", *SMALL]) == 3


def test_preset_paper_is_parsed_but_overridable():
    args = cli.build_parser().parse_args(["bench", "fixed", "--preset", "paper", "--trials", "1"])
    p = cli._bench_params(args)
    assert (p.m, p.n, p.ks, p.sigmas, p.trials) == (1024, 4096, (150,), (0.05,), 1)
    args = cli.build_parser().parse_args(["bench", "sparsity"])
    p = cli._bench_params(args)
    assert p.sigmas == (0.01,) and all(k < p.m for k in p.ks)
