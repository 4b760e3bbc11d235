import json
import subprocess
import sys

import pytest

from petrismc.cli import EXIT_INTERNAL, EXIT_OK, EXIT_USAGE, EXIT_VIOLATED, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def check_json(capsys, *argv):
    code, out, err = run(capsys, "check", *argv)
    assert code == EXIT_OK, err
    return json.loads(out)


def test_simulate_controlsys(capsys):
    code, out, _ = run(capsys, "simulate", "--horizon", "100", "--seed", "3")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0].startswith("time,number_sensors,number_actuators,")
    assert len(lines) >= 102
    assert lines[1].startswith("0,50,30,2,2,2,0,")
    assert run(capsys, "simulate", "--horizon", "100", "--seed", "3")[1] == out
    assert run(capsys, "simulate", "--horizon", "100", "--seed", "4",
               "--trace-index", "1")[1].splitlines()[0] == lines[0]


def test_simulate_to_file(capsys, tmp_path):
    dest = tmp_path / "t.csv"
    code, out, _ = run(capsys, "simulate", "--model", "race", "--horizon", "1h",
                       "--out", str(dest))
    assert code == EXIT_OK and out == ""
    assert dest.read_text().startswith("time,fired1,fired2\n0,0,0\n")


def test_unknown_model(capsys):
    code, _, err = run(capsys, "simulate", "--model", "nosuch", "--horizon", "10")
    assert code == EXIT_USAGE and "nosuch" in err


def test_check_fixed(capsys):
    d = check_json(capsys, "--model", "race", "--prop", "true", "--runs", "20")
    assert d["estimate"] == 1.0 and d["traces_used"] == 20 and d["kind"] == "fixed"
    assert "elapsed_seconds" in d and d["seed"] == 0


def test_check_chernoff(capsys):
    d = check_json(capsys, "--model", "race", "--prop", "F<=100 fired1",
                   "--chernoff", "0.01", "0.05", "--no-timing")
    assert d["traces_used"] == 18445 and d["parameters"]["n"] == 18445
    assert abs(d["estimate"] - 0.25) < 0.01
    assert "elapsed_seconds" not in d


def test_check_controlsys_property(capsys):
    d = check_json(capsys, "--prop", "F<=1440 failure_1", "--runs", "20", "--seed", "1")
    assert d["estimate"] == 0.0 and d["property"] == "F<=1440 failure_1"


def test_check_sprt_and_expect(capsys):
    argv = ("--model", "race", "--prop", "F<=100 fired1", "--sprt", "0.5")
    d = check_json(capsys, *argv)
    assert d["verdict"] == "Reject"
    assert run(capsys, "check", *argv, "--expect", "reject")[0] == EXIT_OK
    code, out, _ = run(capsys, "check", *argv, "--expect", "accept")
    assert code == EXIT_VIOLATED and json.loads(out)["verdict"] == "Reject"


def test_check_expectation(capsys):
    d = check_json(capsys, "--model", "counter", "--expectation", "count", "--at", "10",
                   "--runs", "300")
    assert d["kind"] == "expectation" and abs(d["estimate"] - 10) < 1
    assert d["ci_low"] < d["estimate"] < d["ci_high"]


def test_config_parameters(capsys, tmp_path):
    cfg = tmp_path / "fast.cfg"
    cfg.write_text("sensor_mttf = 10\n")
    d = check_json(capsys, "--config", str(cfg), "--prop", "F<=1000 failure_1", "--runs", "20")
    assert d["estimate"] == 1.0


@pytest.mark.parametrize("argv,needle", [
    (["--prop", "F<=10 (failure_1"], "column"),
    (["--prop", "F<=10 nope", "--runs", "5"], "nope"),
    (["--prop", "true", "--sprt", "0.5", "--half-width", "0.6"], "indifference"),
    (["--prop", "true", "--expect", "accept"], "--sprt"),
    (["--prop", "true", "--sprt", "0.5", "--runs", "5"], "--runs"),
    (["--expectation", "count", "--model", "counter"], "--at"),
    (["--model", "race"], "--prop"),
    (["--model", "missing.json", "--prop", "true"], "cannot read"),
])
def test_check_user_errors(capsys, argv, needle):
    code, out, err = run(capsys, "check", *argv)
    assert code == EXIT_USAGE and out == ""
    assert err.startswith("petrismc: error:") and needle in err


def test_bad_arguments_exit_2(capsys):
    with pytest.raises(SystemExit) as e:
        main(["check", "--seed", "-1", "--prop", "true"])
    assert e.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as e:
        main(["simulate", "--horizon", "0"])
    assert e.value.code == EXIT_USAGE


def test_internal_error_exit_3(capsys, monkeypatch):
    import petrismc.cli as cli

    def boom(args):
        raise RuntimeError("bug")
    monkeypatch.setitem(cli.COMMANDS, "validate", boom)
    code, _, err = run(capsys, "validate")
    assert code == EXIT_INTERNAL and "internal error" in err


def test_experiment_preset(capsys):
    code, out, _ = run(capsys, "experiment", "--preset", "fig4", "--runs", "4")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "T,property,estimate,ci_low,ci_high,n,seed"
    assert len(lines) == 1 + 24
    assert lines[1].startswith("14400.0,F<=T failure_1,")


def test_experiment_file(capsys, tmp_path):
    spec = tmp_path / "exp.cfg"
    spec.write_text("kind = expectation\nproperties = count\ntimes = 5, 10\nruns = 50\n"
                    "model = counter\nseed = 4\n")
    code, out, _ = run(capsys, "experiment", str(spec))
    rows = out.splitlines()[1:]
    assert code == EXIT_OK and len(rows) == 2 and rows[0].endswith(",50,4")
    code, out2, _ = run(capsys, "experiment", str(spec), "--seed", "5")
    assert out2.splitlines()[1].endswith(",50,5")


def test_experiment_needs_one_source(capsys):
    assert run(capsys, "experiment")[0] == EXIT_USAGE
    code, _, err = run(capsys, "experiment", "--preset", "fig9")
    assert code == EXIT_USAGE and "fig9" in err


def test_validate(capsys):
    code, out, _ = run(capsys, "validate", "--prop", "F<=10 failure_1")
    assert code == EXIT_OK
    assert "controlsys: 90 places, 89 rules" in out
    code, out, _ = run(capsys, "validate", "--prop", "F<=10 nope")
    assert code == EXIT_USAGE and "error:" in out and "nope" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "petrismc", "check", "--model", "race",
                           "--prop", "F<=100 fired1", "--sprt", "0.05", "--half-width", "0.025",
                           "--expect", "accept", "--no-timing"],
                          capture_output=True, text=True)
    assert proc.returncode == EXIT_OK, proc.stderr
    assert json.loads(proc.stdout)["verdict"] == "Accept"
