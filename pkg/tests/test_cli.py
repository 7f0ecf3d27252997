"""Command-line interface tests: subcommands, flags, and exit codes.

Everything runs in-process through main(argv) so coverage and speed stay
reasonable; one subprocess test proves the installed console script works.
"""

import json
import shutil
import subprocess

import pytest

from thetanet.cli import _cap_blas_threads, main
from thetanet.netgen import load_edge_list
from thetanet.outputs import read_csv_columns

SIM_INI = """\
[run]
model = theta-syn
seed = 3

[p_in]
kind = uniform-width
mean = 10
sigma = 2

[p_out]
kind = uniform-width
mean = 10
sigma = 4

[heterogeneity]
kind = lorentzian
center = 1.0
scale = 0.05

[params]
K = -2.0
tau = 1.0
n = 40
t_end = 2.0
stats_window = 0.5
"""

MF_INI = """\
[run]
model = mf-syn
seed = 0

[params]
eta0 = 1.0
delta = 0.05
K = -2.0
tau = 1.0
sigma = 50.0
count = 30
t_end = 5.0
stats_window = 2.0
"""


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="ascii")
    return str(path)


def test_simulate_writes_series_and_manifest(tmp_path, capsys):
    ini = _write(tmp_path, "sim.ini", SIM_INI)
    out = tmp_path / "run"
    assert main(["simulate", "--config", ini, "--out", str(out)]) == 0
    printed = capsys.readouterr().out.splitlines()
    assert str(out / "series.csv") in printed
    assert str(out / "manifest.json") in printed
    cols = read_csv_columns(out / "series.csv")
    assert list(cols) == ["t", "s_hat"]
    assert cols["t"][0] == 0.0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seed"] == 3
    assert "trailing_std" in manifest["results"]
    assert (out / "series.svg").exists()


def test_simulate_seed_flag_overrides_config(tmp_path):
    ini = _write(tmp_path, "sim.ini", SIM_INI)
    a, b, c = (tmp_path / k for k in "abc")
    for out, seed in ((a, "3"), (b, "4"), (c, "4")):
        assert main(["simulate", "--config", ini, "--out", str(out),
                     "--seed", seed]) == 0
    series_a = (a / "series.csv").read_text()
    assert series_a != (b / "series.csv").read_text()
    assert (b / "series.csv").read_text() == (c / "series.csv").read_text()
    assert json.loads((b / "manifest.json").read_text())["seed"] == 4


def test_set_overrides_reach_the_run(tmp_path):
    ini = _write(tmp_path, "sim.ini", SIM_INI)
    out = tmp_path / "short"
    assert main(["simulate", "--config", ini, "--out", str(out),
                 "--set", "t_end=0.5", "--set", "run.seed=9"]) == 0
    cols = read_csv_columns(out / "series.csv")
    assert cols["t"][-1] == pytest.approx(0.5)
    assert json.loads((out / "manifest.json").read_text())["seed"] == 9


def test_meanfield_command(tmp_path):
    ini = _write(tmp_path, "mf.ini", MF_INI)
    out = tmp_path / "mf"
    assert main(["meanfield", "--config", ini, "--out", str(out)]) == 0
    cols = read_csv_columns(out / "series.csv")
    assert list(cols) == ["t", "s"]
    results = json.loads((out / "manifest.json").read_text())["results"]
    # sigma = 50 is on the quiescent side: the reduced model settles
    assert results["trailing_std"] < 1e-3


def test_continue_command_traces_a_branch(tmp_path):
    ini = _write(tmp_path, "cont.ini", MF_INI + """\
param = eta0
p_start = -1.5
p_min = -1.5
p_max = -1.2
ds0 = 0.05
""")
    # excitatory branch segment without bifurcations
    out = tmp_path / "branch"
    assert main(["continue", "--config", ini, "--out", str(out),
                 "--set", "K=5.0", "--set", "sigma=10.0",
                 "--set", "count=20"]) == 0
    cols = read_csv_columns(out / "branch.csv")
    assert cols["eta0"].min() >= -1.5 - 1e-9
    assert cols["eta0"].max() >= -1.2 - 1e-2
    assert set(cols["stable"]) <= {0.0, 1.0}
    assert (out / "bifurcations.csv").exists()
    status = json.loads((out / "manifest.json").read_text())["results"]["status"]
    assert status == "completed-range"


def test_sweep_command_1d(tmp_path):
    ini = _write(tmp_path, "mf.ini", MF_INI + "dt = 0.01\n")
    out = tmp_path / "sweep"
    code = main(["sweep", "--config", ini, "--out", str(out), "--threads", "2",
                 "--set", "params.t_end=30", "--set", "params.stats_window=10",
                 "--set", "grid.param1=sigma", "--set", "grid.range1=20:50:3"])
    assert code == 0
    cols = read_csv_columns(out / "sweep.csv")
    assert cols["sigma"] == pytest.approx([20.0, 35.0, 50.0])
    stds = dict(zip(cols["sigma"], cols["std"]))
    # oscillation death as the degree width grows
    assert stds[20.0] > 1e-2 > stds[50.0]
    assert list(cols["status"]) == ["ok"] * 3


def test_figure_list_and_unknown_name(tmp_path, capsys):
    assert main(["figure", "--list"]) == 0
    listing = capsys.readouterr().out
    for name in ("fig1", "fig7", "gap-snic", "ml-gap-hopf"):
        assert name in listing
    assert main(["figure", "does-not-exist", "--out", str(tmp_path)]) == 2
    assert "unknown recipe" in capsys.readouterr().err


def test_netgen_flags_and_determinism(tmp_path, capsys):
    out = tmp_path / "net.edges"
    args = ["netgen", "--p-in", "uniform:20:5", "--p-out", "uniform:20:8",
            "--n", "60", "--seed", "5", "--out", str(out)]
    assert main(args) == 0
    assert "directed" in capsys.readouterr().out
    net = load_edge_list(out)
    assert net.directed and net.n == 60
    first = out.read_text()
    assert main(args) == 0
    assert out.read_text() == first

    undirected = tmp_path / "undir.edges"
    assert main(["netgen", "--p-in", "uniform:20:5", "--n", "60",
                 "--out", str(undirected)]) == 0
    assert not load_edge_list(undirected).directed


def test_netgen_from_config(tmp_path, capsys):
    ini = _write(tmp_path, "net.ini", SIM_INI)
    out = tmp_path / "cfg.edges"
    assert main(["netgen", "--config", ini, "--out", str(out)]) == 0
    assert load_edge_list(out).n == 40
    capsys.readouterr()


def test_config_errors_exit_2(tmp_path, capsys):
    assert main(["simulate"]) == 2                       # no --config
    assert main(["simulate", "--config", str(tmp_path / "gone.ini")]) == 2
    bad = _write(tmp_path, "bad.ini", "[params]\nwrong_key = 1\n")
    assert main(["simulate", "--config", bad]) == 2
    ini = _write(tmp_path, "sim.ini", SIM_INI)
    assert main(["simulate", "--config", ini, "--set", "nonsense"]) == 2
    assert main(["netgen", "--p-in", "uniform:20:5"]) == 2  # missing --n
    assert main(["netgen", "--p-in", "pareto:20:5", "--n", "30"]) == 2
    err = capsys.readouterr().err
    assert err.count("config error") == 6


def test_bad_flags_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--unknown-flag"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["not-a-command"])
    assert exc.value.code == 2


def test_numerical_failure_exits_3(tmp_path, capsys):
    # tau far below dt makes the explicit update of u violently unstable
    ini = _write(tmp_path, "blowup.ini", SIM_INI.replace(
        "t_end = 2.0", "t_end = 500.0\ndt = 1.0").replace(
        "tau = 1.0", "tau = 0.01"))
    assert main(["simulate", "--config", ini,
                 "--out", str(tmp_path / "x")]) == 3
    assert "numerical failure" in capsys.readouterr().err


def test_blas_cap_sets_environment(monkeypatch):
    names = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
             "NUMEXPR_NUM_THREADS")
    for name in names:
        monkeypatch.delenv(name, raising=False)
    _cap_blas_threads(2)
    import os
    for name in names:
        assert os.environ[name] == "2"
    _cap_blas_threads(8)  # setdefault: an existing value wins
    assert os.environ["OMP_NUM_THREADS"] == "2"


def test_console_script_runs():
    exe = shutil.which("thetanet")
    assert exe, "console script not on PATH; install with pip install -e ."
    proc = subprocess.run([exe, "figure", "--list"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert "fig1" in proc.stdout
