import csv
import json

import numpy as np
import pytest

from loewnerkit.cli import main, parse_complex_list, parse_grid
from loewnerkit.dataset import load_dataset
from loewnerkit.metrics import FitReport


@pytest.fixture
def data(tmp_path):
    path = tmp_path / "d.csv"
    assert main(["synth", "--order", "6", "--grid", "0.1:0.1:20", "--seed", "3",
                 "-o", str(path)]) == 0
    return path


def run(capsys, argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_grid_parsing():
    np.testing.assert_allclose(parse_grid("1:0.5:3"), [1, 1.5, 2, 2.5, 3])
    np.testing.assert_allclose(parse_grid("1,2,5"), [1, 2, 5])
    assert parse_grid("1:0.1:100").size == 991


def test_complex_parsing():
    np.testing.assert_array_equal(parse_complex_list("-1+0.77j, -2"), [-1 + 0.77j, -2])


def test_fit_writes_model_and_report(tmp_path, data, capsys):
    out = tmp_path / "m.json"
    code, stdout, _ = run(capsys, ["fit", "-i", data, "--method", "ls-loewner", "--order", 6,
                                   "-o", out, "--errors", tmp_path / "e.csv"])
    assert code == 0 and stdout.count("\n") == 1
    rep = json.loads((tmp_path / "m.report.json").read_text())
    assert rep["order"] == 6 and rep["epsilon"] < 1e-8
    assert (tmp_path / "e.csv").read_text().startswith("omega,abs_err,rel_err")


def test_fit_lfpp_poles(tmp_path, data, capsys):
    out = tmp_path / "pp.json"
    code, _, _ = run(capsys, ["fit", "-i", data, "--method", "lfpp",
                              "--poles=-1+0.77j,-0.5+3j", "--nodes", "0.5j,5j", "-o", out])
    assert code == 0
    code, _, _ = run(capsys, ["poles", out, "-o", tmp_path / "p.json"])
    doc = json.loads((tmp_path / "p.json").read_text())
    got = sorted((round(p["re"], 8), round(abs(p["im"]), 8)) for p in doc["poles"])
    assert got == sorted([(-1.0, 0.77), (-1.0, 0.77), (-0.5, 3.0), (-0.5, 3.0)])
    assert doc["stable"]


def test_missing_input(tmp_path, capsys):
    code, _, err = run(capsys, ["fit", "-i", tmp_path / "nope.csv", "--method", "aaa",
                                "-o", tmp_path / "x.json"])
    assert code == 2
    assert json.loads(err)["exit_code"] == 2


def test_bad_flags(capsys):
    code, _, err = run(capsys, ["fit", "--method", "nope"])
    assert code == 2 and json.loads(err)["error"] == "UsageError"


def test_order_and_tau_conflict(tmp_path, data, capsys):
    code, _, _ = run(capsys, ["fit", "-i", data, "--method", "loewner-svd", "--order", 4,
                              "--tau", 1e-6, "-o", tmp_path / "x.json"])
    assert code == 2


def test_numerical_failure_exit(tmp_path, data, capsys):
    code, _, err = run(capsys, ["fit", "-i", data, "--method", "lfpp", "--poles=0.5j",
                                "--nodes=0.5j", "-o", tmp_path / "x.json"])
    assert code == 1 and json.loads(err)["error"] == "NodeCollisionError"


def test_sweep_exact_and_deterministic(tmp_path, capsys):
    d = tmp_path / "d5.csv"
    run(capsys, ["synth", "--order", 5, "--grid", "0.1:0.1:10", "--seed", 1, "-o", d])
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        code, _, _ = run(capsys, ["sweep", "-i", d, "--methods", "loewner-svd", "--orders",
                                  "1:1:8", "--complex", "-o", out])
        assert code == 0
    assert a.read_bytes() == b.read_bytes()
    rows = list(csv.DictReader(a.open()))
    assert len(rows) == 8
    assert all(float(r["eps"]) <= 1e-8 for r in rows if int(r["r"]) >= 5)


def test_sweep_mimo_steps(tmp_path, capsys):
    d = tmp_path / "mimo.json"
    run(capsys, ["synth", "--order", 6, "--m", 3, "--p", 3, "--grid", "0.1:0.1:6",
                 "--seed", 2, "-o", d])
    out = tmp_path / "s.csv"
    code, _, _ = run(capsys, ["sweep", "-i", d, "--methods", "ls-loewner", "--orders", "1:1:12",
                              "-o", out])
    assert code == 0
    rs = [int(r["r"]) for r in csv.DictReader(out.open())]
    assert rs == [3, 6, 9, 12]


def test_noise_deterministic(tmp_path, data, capsys):
    for name in ("n1.csv", "n2.csv"):
        assert run(capsys, ["noise", "-i", data, "--sigma2", 0.15, "--seed", 7,
                            "-o", tmp_path / name])[0] == 0
    assert (tmp_path / "n1.csv").read_bytes() == (tmp_path / "n2.csv").read_bytes()
    assert (tmp_path / "n1.csv").read_bytes() != data.read_bytes()


def test_eval_grid_rows(tmp_path, data, capsys):
    m = tmp_path / "m.json"
    run(capsys, ["fit", "-i", data, "--method", "loewner-svd", "--order", 6, "-o", m])
    out = tmp_path / "ev.csv"
    assert run(capsys, ["eval", m, "--grid", "1:0.1:100", "--hz", "-o", out])[0] == 0
    assert len(load_dataset(out)) == 991


def test_fit_then_eval_matches_report(tmp_path, data, capsys):
    m = tmp_path / "m.json"
    run(capsys, ["fit", "-i", data, "--method", "ls-loewner", "--order", 4, "-o", m])
    out = tmp_path / "ev.json"
    assert run(capsys, ["eval", m, "-i", data, "-o", out])[0] == 0
    ref, ev = load_dataset(data), load_dataset(out)
    rep = FitReport.from_dict(json.loads((tmp_path / "m.report.json").read_text()))
    abs_err = np.abs(ref.values - ev.values)[:, 0, 0]
    np.testing.assert_allclose(abs_err, rep.abs_errors, rtol=0, atol=1e-14)


def test_lfpp_output_stable(tmp_path, data, capsys):
    m = tmp_path / "pp.json"
    run(capsys, ["fit", "-i", data, "--method", "lfpp", "--poles=-0.2+1j,-0.4+6j",
                 "--nodes", "0.5j,3j", "-o", m])
    run(capsys, ["poles", m])
    doc = json.loads((tmp_path / "pp.poles.json").read_text())
    assert all(p["re"] < 0 for p in doc["poles"])
