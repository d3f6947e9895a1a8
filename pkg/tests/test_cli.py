import csv
import io
import json
import subprocess
import sys

import pytest

from padic_periods import cli, scenarios

FIELDS = {"scenario", "params", "value_exact", "value_float", "expected", "verdict", "anchor", "seconds"}


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_integral_report_shape(capsys):
    code, out, _ = run(capsys, "integral", "--p", "5", "--cpi", "4", "--d", "1")
    assert code == 0
    rows = json.loads(out)
    assert len(rows) == 1 and set(rows[0]) == FIELDS
    r = rows[0]
    assert r["value_exact"] == "0" and r["expected"] == "0" and r["verdict"] == "pass"
    assert set(r["value_float"]) == {"re", "im"}


def test_json_is_canonical(capsys):
    _, out, _ = run(capsys, "gauss", "--eta-level", "2", "--deterministic")
    rows = json.loads(out)
    assert out == json.dumps(rows, sort_keys=True, indent=2) + "\n"
    assert all(r["verdict"] == "pass" for r in rows)


def test_gauss_quadratic(capsys):
    _, out, _ = run(capsys, "gauss", "--eta-level", "1", "--eta-index", "1")
    rows = json.loads(out)
    top = [r for r in rows if r["params"]["shell"] == 1][0]
    assert top["expected"] == "|G|^2 = 5/16"


def test_principal_series_integral(capsys):
    code, out, _ = run(capsys, "integral", "--rep", "ps", "--cpi", "2", "--omega-level", "1", "--d", "1")
    assert code == 0 and json.loads(out)[0]["value_exact"] == "1/6"


def test_mc_models_agree(capsys):
    code, out, _ = run(capsys, "mc", "--rep", "ps", "--cpi", "2", "--a", "1/5", "--b", "2", "--d", "1")
    assert code == 0 and json.loads(out)[0]["verdict"] == "pass"
    code, out, _ = run(capsys, "mc", "--a", "3", "--b", "1")
    assert code == 0 and json.loads(out)[0]["expected"] == "closed form = Kirillov evaluation"


def test_epsilon_is_unitary(capsys):
    code, out, _ = run(capsys, "epsilon", "--eta-level", "1", "--eta-index", "2")
    assert code == 0 and json.loads(out)[0]["verdict"] == "pass"


def test_sweep_lists_every_translate(capsys):
    code, out, _ = run(capsys, "sweep", "--cpi", "2")
    rows = json.loads(out)
    assert code == 0 and [r["params"]["d"] for r in rows] == [0, 1, 2]
    assert all(r["value_exact"] == "0" for r in rows if r["params"]["d"] != 1)


def test_csv_output(capsys):
    code, out, _ = run(capsys, "integral", "--out", "csv", "--backend", "float")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 1
    assert abs(float(rows[0]["value_float_re"]) - 1 / 6) < 1e-9 and rows[0]["value_exact"] == ""


def test_invalid_parameters_exit_2(capsys):
    assert run(capsys, "integral", "--p", "4")[0] == 2
    assert run(capsys, "integral", "--theta-index", "999", "--cpi", "3")[0] == 2
    assert run(capsys, "verify", "--filter", "no-such-*")[0] == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["integral", "--ext", "split"])
    assert exc.value.code == 2


def test_range_error_exit_3(capsys):
    code, _, err = run(capsys, "epsilon", "--eta-level", "3")
    assert code == 3 and "range" in err


def test_failed_verdict_exit_1(capsys, monkeypatch):
    bad = scenarios.Outcome(scenarios.EXACT.rational(1), "0", False, {"p": 5})
    monkeypatch.setattr(scenarios, "REGISTRY", [scenarios.Scenario("always-fails", lambda: bad, "demo")])
    code, out, _ = run(capsys, "verify")
    assert code == 1 and json.loads(out)[0]["verdict"] == "fail"


def test_output_directory_from_environment(capsys, monkeypatch, tmp_path):
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path))
    code, out, err = run(capsys, "verify", "--filter", "inert-value", "--deterministic")
    assert code == 0 and out == ""
    rows = json.loads((tmp_path / "verify.json").read_text())
    assert rows[0]["value_exact"] == "1/6" and rows[0]["anchor"]


def test_verify_overrides_reach_the_scenario(capsys):
    code, out, _ = run(capsys, "verify", "--filter", "ps-ramified-even", "--p", "7")
    row = json.loads(out)[0]
    assert code == 0 and row["params"]["p"] == 7 and row["value_exact"] == "1/14"


def test_reports_identical_across_worker_counts(capsys):
    args = ["verify", "--filter", "ps-*", "--deterministic"]
    _, one, _ = run(capsys, *args)
    _, many, _ = run(capsys, *args, "--jobs", "3")
    assert one == many


def test_every_scenario_has_an_anchor():
    ids = [s.id for s in scenarios.REGISTRY]
    assert len(ids) == len(set(ids))
    assert all(s.anchor for s in scenarios.REGISTRY)


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "padic_periods.cli", "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    for sub in ("gauss", "epsilon", "mc", "integral", "sweep", "decay", "verify"):
        assert sub in out.stdout
