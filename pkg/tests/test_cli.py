import io

import numpy as np

from polygossip.bench import read_csv
from polygossip.cli import main
from polygossip.graphgen import load_graph


def test_generate_dump(tmp_path, capsys):
    path = tmp_path / "g.txt"
    rc = main(["generate", "--graph", "cycle", "--n", "8", "--out", str(path)])
    assert rc == 0
    with open(path) as f:
        g = load_graph(f)
    assert g.n == 8 and g.edge_count == 8


def test_generate_to_stdout(capsys):
    rc = main(["generate", "--graph", "path", "--n", "4"])
    assert rc == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "4 3"


def test_spectrum_summary_and_measure(tmp_path, capsys):
    path = tmp_path / "measure.csv"
    rc = main(["spectrum", "--graph", "complete", "--n", "5",
               "--measure-vertex", "0", "--out", str(path)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "gap=1.25" in out
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "lambda,weight"
    rows = [tuple(map(float, ln.split(","))) for ln in lines[1:]]
    assert abs(sum(w for _, w in rows) - 1.0) < 1e-12


def test_coeffs_table(tmp_path):
    path = tmp_path / "coeffs.csv"
    rc = main(["coeffs", "--recurrence", "jacobi", "--d", "2",
               "--tmax", "3", "--out", str(path)])
    assert rc == 0
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "t,a,b,c"
    t1 = lines[2].split(",")
    assert float(t1[1]) == 10 / 9 and float(t1[3]) == 5 / 27


def test_run_produces_csv(tmp_path):
    path = tmp_path / "run.csv"
    rc = main(["run", "--graph", "grid", "--dims", "6", "6",
               "--methods", "simple,jacobi:d=2", "--tmax", "10",
               "--reps", "2", "--seed", "5", "--out", str(path)])
    assert rc == 0
    records = read_csv(str(path))
    assert {r.method for r in records} == {"simple", "jacobi(d=2)"}


def test_mse_subcommand(tmp_path):
    path = tmp_path / "mse.csv"
    rc = main(["mse", "--graph", "torus", "--dims", "10", "10",
               "--methods", "simple", "--tmax", "5", "--reps", "2",
               "--out", str(path)])
    assert rc == 0
    records = read_csv(str(path))
    assert all(r.mse is not None for r in records)


def test_sweep_subcommand(tmp_path, capsys):
    path = tmp_path / "sweep.csv"
    rc = main(["sweep", "--graph", "grid", "--dims", "5", "5",
               "--alphas", "1.0", "--betas", "0.0", "0.5",
               "--tmax", "5", "--reps", "1", "--out", str(path)])
    assert rc == 0
    assert "in_region=True" in capsys.readouterr().out
    assert len({r.method for r in read_csv(str(path))}) == 2


def test_reproduce_rejects_unknown_figure(capsys):
    rc = main(["reproduce", "--figure", "nope"])
    assert rc == 2


def test_config_errors_exit_2(capsys):
    rc = main(["run", "--graph", "random_regular", "--n", "5", "--d", "3",
               "--methods", "simple", "--tmax", "4"])
    assert rc == 2
    assert "error" in capsys.readouterr().err


def test_bad_method_string_exits_2(capsys):
    rc = main(["run", "--graph", "path", "--n", "5", "--methods", "jacobi:d",
               "--tmax", "4"])
    assert rc == 2
