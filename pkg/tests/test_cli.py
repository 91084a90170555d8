import csv
import io
import subprocess
import sys

import numpy as np
import pytest

from stieltjes2d import registry
from stieltjes2d.cli import main, run
from stieltjes2d.gridio import write_grid

UNIT = ["--rect", "0", "1", "0", "1"]


def kv(text):
    return dict(line.split("=", 1) for line in text.strip().splitlines())


def test_integrate_midpoint():
    rep, code = run(["integrate", "--rule", "midpoint", "--f", "reg:sum_ts", "--u", "reg:prod_ts", *UNIT])
    assert code == 0
    assert rep.results["value"] == 1.0
    assert (rep.results["node_t"], rep.results["node_s"]) == (0.5, 0.5)


def test_certify_trapezoid():
    rep, code = run(["certify", "--rule", "trapezoid4", "--bound", "trapezoid-bv", "--f", "reg:prod_ts", *UNIT,
                     "--V", "1"])
    assert code == 0
    d = kv(rep.to_kv())
    assert d["bound"] == "0.25" and d["residual"] == "0.0" and d["satisfied"] == "true"


def test_converge_table_strictly_decreasing():
    rep, code = run(["converge", "--rule", "riemann", "--f", "reg:prod_ts", *UNIT, "--levels", "6",
                     "--format", "csv"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(rep.to_csv())))
    assert [int(r["level"]) for r in rows] == list(range(1, 7))
    err = [float(r["error"]) for r in rows]
    assert all(b < a for a, b in zip(err[1:], err[2:]))


def test_undersized_certificate_exits_2():
    rep, code = run(["certify", "--rule", "trapezoid4", "--bound", "trapezoid-bv", "--f", "reg:t2s2", *UNIT,
                     "--V", "0.01"])
    assert code == 2 and rep.results["satisfied"] is False


@pytest.mark.parametrize("argv", [
    ["integrate", "--rule", "midpoint", "--f", "reg:nope", "--u", "reg:prod_ts", *UNIT],
    ["integrate", "--rule", "midpoint", "--f", "reg:sum_ts", "--rect", "1", "0", "0", "1"],
    ["integrate", "--rule", "midpoint", "--f", "reg:sum_ts", "--rect", "0", "1", "0"],
    ["certify", "--rule", "trapezoid4", "--bound", "omega-range", "--f", "reg:prod_ts", *UNIT, "--V", "1"],
    ["frobnicate", *UNIT],
    ["integrate", "--rule", "midpoint", "--f", "missing_file.csv", *UNIT],
])
def test_errors_exit_1(argv):
    rep, code = run(argv)
    assert code == 1 and "error" in rep.results


def test_grid_file_input(tmp_path):
    xs = ys = np.linspace(0, 1, 5)
    p = tmp_path / "ts.csv"
    write_grid(p, xs, ys, registry.get("prod_ts")(xs[None, :], ys[:, None]))
    rep, code = run(["integrate", "--rule", "midpoint", "--f", "reg:sum_ts", "--u", str(p), *UNIT])
    assert code == 0 and rep.results["value"] == pytest.approx(1.0, abs=1e-15)


def test_out_file_and_determinism(tmp_path):
    out = tmp_path / "r.kv"
    argv = ["certify", "--rule", "trapezoid4", "--bound", "trapezoid-bv", "--f", "reg:prod_ts", *UNIT, "--V", "1"]
    rep1, _ = run([*argv, "--out", str(out)])
    rep2, _ = run(argv)
    assert kv(out.read_text())["bound"] == "0.25"
    assert rep1.digest == rep2.digest and rep1.results == rep2.results


def test_other_subcommands():
    rep, code = run(["variation", "--f", "reg:t2s2", *UNIT])
    assert code == 0 and rep.results["vitali"] == pytest.approx(1.0)
    rep, code = run(["gruss", "--f", "reg:prod_ts", "--g", "reg:prod_ts", *UNIT])
    assert code == 0 and rep.results["T"] == pytest.approx(7 / 144, abs=1e-12)
    rep, code = run(["taylor", "--f", "reg:exp_sum", "--n", "1", "--x", "0.3", "--y", "0.6", *UNIT])
    assert code == 0 and rep.results["n"] == 1


def test_main_writes_stdout(capsys):
    code = main(["integrate", "--rule", "midpoint", "--f", "reg:sum_ts", "--u", "reg:prod_ts", *UNIT])
    assert code == 0 and "value=1.0" in capsys.readouterr().out


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "stieltjes2d.cli", "integrate", "--rule", "midpoint", "--f",
                        "reg:sum_ts", "--u", "reg:prod_ts", *UNIT, "--format", "csv"], capture_output=True, text=True)
    assert r.returncode == 0
    row = next(csv.DictReader(io.StringIO(r.stdout)))
    assert row["value"] == "1.0"
