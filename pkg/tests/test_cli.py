import csv
import json
import subprocess
import sys

import pytest

from padeinterp import twostate
from padeinterp.cli import main
from padeinterp.fit import TRACE_COLUMNS, result_from_json
from padeinterp.pade2p import read_series
from padeinterp.quarkonium import DATA_DIR_ENV, REFERENCE_FITS


def run(*argv):
    return main([str(a) for a in argv])


def test_twostate_table(tmp_path, capsys):
    out = tmp_path / "t.csv"
    assert run("twostate", "--grid", "0:5:101", "-o", out) == 0
    rows = twostate.read_csv(out.read_text())
    assert len(rows) == 101
    assert out.read_text().splitlines()[0] == "lambda,exact,pade,pert_small,pert_large,rel_err_pct"
    assert "1.0153%" in capsys.readouterr().err
    worst = max(rows, key=lambda r: r.relative_error_pct)
    assert worst.lam == pytest.approx(1.0) and worst.relative_error_pct == pytest.approx(1.02, abs=0.01)


def test_twostate_single_point(capsys):
    assert run("twostate", "--grid", "0:0:1") == 0
    (row,) = twostate.read_csv(capsys.readouterr().out)
    assert row.relative_error_pct == 0.0


@pytest.mark.parametrize("grid", ["5:0:10", "0:1", "a:b:c", "0:1:1", "-1:1:5", "0:1:0"])
def test_twostate_bad_grid(grid):
    assert run("twostate", "--grid", grid) == 2


def test_pade_two_state(tmp_path, capsys):
    f = tmp_path / "s.txt"
    f.write_text("small: 1 0 0.5\nlarge: 1 1 0 0.5\n")
    assert run("pade", f) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["numerator"] == pytest.approx([1, 1.5, 1.5, 1], abs=1e-12)
    assert doc["denominator"] == pytest.approx([1, 1.5, 1], abs=1e-12)
    assert doc["poles"] == [] and doc["order"] == 2


def test_pade_zeroth_order(tmp_path, capsys):
    f = tmp_path / "s.txt"
    f.write_text("small: 1\nlarge: 1 2\n")
    assert run("pade", f) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["numerator"] == [1.0, 2.0] and doc["denominator"] == [1.0]


def test_pade_reports_poles(tmp_path, capsys):
    # the published first-order Upsilon(2S) series has a pole at beta = 0.343
    from padeinterp.perturb import beta_expansion
    from padeinterp.pade2p import write_series

    p = REFERENCE_FITS["unconstrained-1"]
    pair = beta_expansion(p.m_b / 1000, p.alpha, p.lam, 2, 1, "bound-states")
    f = tmp_path / "s.txt"
    f.write_text(write_series(pair.small, pair.large))
    assert run("pade", f, "--interval", "0:1.05") == 0
    (pole,) = json.loads(capsys.readouterr().out)["poles"]
    assert pole["location"] == pytest.approx(0.343, abs=1e-3)


@pytest.mark.parametrize(
    "text, code",
    [
        ("small: 1 0 0.5\nlarge: 1 1 0\n", 2),  # mismatched orders
        ("small: 1 x\nlarge: 1 1 0\n", 2),
        ("small: 1 1\nlarge: 1 1 1\n", 1),  # singular system
    ],
)
def test_pade_errors(tmp_path, text, code):
    f = tmp_path / "s.txt"
    f.write_text(text)
    assert run("pade", f) == code


def test_pade_missing_file(tmp_path):
    assert run("pade", tmp_path / "nope.txt") == 2
    assert run("pade", tmp_path / "nope.txt", "--interval", "1:0") == 2


def test_spectrum_verify(capsys):
    assert run("spectrum", "--preset", "unconstrained-2", "--verify") == 0
    doc = json.loads(capsys.readouterr().out)
    pred = [lv["predicted_mev"] for lv in doc["levels"]]
    assert pred == pytest.approx([3097, 3686, 9460, 10023, 10355], abs=5)
    assert doc["verify"]["passed"] and doc["verify"]["max_abs_diff_mev"] <= 5
    assert doc["fit_quality_mev2"] < 1 and doc["order"] == 2


def test_spectrum_flags_override_preset(capsys):
    assert run("spectrum", "--preset", "unconstrained-2", "--V-c", "2865") == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["params"]["V_c"] == 2865.0
    assert doc["levels"][0]["predicted_mev"] == pytest.approx(3196.7, abs=0.1)
    assert doc["levels"][0]["oracle_mev"] is None


def test_spectrum_alpha_zero(capsys):
    assert run("spectrum", "--preset", "unconstrained-2", "--alpha", "0", "--oracle") == 0
    for lv in json.loads(capsys.readouterr().out)["levels"]:
        assert lv["predicted_mev"] == pytest.approx(lv["oracle_mev"], abs=1e-3)


@pytest.mark.parametrize(
    "extra",
    [["--m-c", "-1500"], ["--lam", "0"], ["--alpha", "-0.2"], ["--m-b", "1000"], ["--order", "4"], []],
)
def test_spectrum_usage_errors(extra):
    preset = ["--preset", "unconstrained-2"] if extra else []
    assert run("spectrum", *preset, *extra) == 2


def test_spectrum_pole_is_compute_failure(capsys):
    assert run("spectrum", "--preset", "unconstrained-1", "--order", "1") == 1
    err = capsys.readouterr().err
    assert "bottom n=2" in err and "pole" in err


def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults for this run\npreset = unconstrained-2\nV-c = 2865\noracle = false\n")
    assert run("spectrum", "--config", cfg) == 0
    assert json.loads(capsys.readouterr().out)["params"]["V_c"] == 2865.0
    # the flag beats the file
    assert run("spectrum", "--config", cfg, "--V-c", "2765") == 0
    assert json.loads(capsys.readouterr().out)["params"]["V_c"] == 2765.0


@pytest.mark.parametrize("text", ["colour = red\n", "order = seven\n", "oracle = maybe\n", "just words\n",
                                  "method = guess\n"])
def test_config_errors(tmp_path, text):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("preset = unconstrained-2\n" + text)
    assert run("spectrum", "--config", cfg) == 2


def test_data_dir_env(tmp_path, monkeypatch, capsys):
    (tmp_path / "levels.csv").write_text("name,flavor,n,mass_mev\nJ/psi(1S),charm,1,3097\n")
    monkeypatch.setenv(DATA_DIR_ENV, str(tmp_path))
    assert run("spectrum", "--preset", "unconstrained-2") == 0
    assert [lv["name"] for lv in json.loads(capsys.readouterr().out)["levels"]] == ["J/psi(1S)"]


def test_empty_data_file(tmp_path):
    empty = tmp_path / "e.csv"
    empty.write_text("")
    assert run("fit", "--data", empty) == 2
    assert run("spectrum", "--preset", "unconstrained-2", "--data", empty) == 2
    assert run("fit", "--data", tmp_path / "missing.csv") == 2


def _starts(tmp_path, key):
    f = tmp_path / "starts.json"
    f.write_text(json.dumps([REFERENCE_FITS[key].as_dict()]))
    return f


def test_fit_unconstrained(tmp_path, capsys):
    trace = tmp_path / "trace.csv"
    out = tmp_path / "fit.json"
    assert run("fit", "--starts", _starts(tmp_path, "unconstrained-2"), "--trace", trace, "-o", out) == 0
    result = result_from_json(json.loads(out.read_text()))
    assert result.quality <= 5 and not result.constrained
    rows = list(csv.reader(trace.open()))
    assert tuple(rows[0]) == TRACE_COLUMNS and len(rows) > 10
    assert "fit quality" in capsys.readouterr().err


def test_fit_constrained(tmp_path, capsys):
    assert run("fit", "--constrained", "--starts", _starts(tmp_path, "constrained-2")) == 0
    captured = capsys.readouterr()
    doc = json.loads(captured.out)
    assert doc["constrained"] and doc["constraint_residual_mev"] < 1e-9
    assert doc["quality_mev2"] <= 10
    assert "constraint residual" in captured.err


def test_fit_all_penalized(tmp_path):
    f = _starts(tmp_path, "unconstrained-1")
    assert run("fit", "--order", "1", "--starts", f, "--max-iter", "1") == 1


@pytest.mark.parametrize("text", ["[]", "not json", '[{"alpha": 1}]'])
def test_fit_bad_starts(tmp_path, text):
    f = tmp_path / "s.json"
    f.write_text(text)
    assert run("fit", "--starts", f) == 2


def test_console_script_usage():
    res = subprocess.run([sys.executable, "-m", "padeinterp.cli", "twostate", "--grid", "5:0:10"],
                         capture_output=True, text=True)
    assert res.returncode == 2 and "error" in res.stderr
    res = subprocess.run([sys.executable, "-m", "padeinterp.cli", "bogus"], capture_output=True, text=True)
    assert res.returncode == 2
