import csv
import io
import json
import os
import subprocess
import sys

import pytest

from pfh_twist.cli import RunConfig, UsageError, fmt, main


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def table(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def test_header_and_homology(capsys):
    code, out, _ = run(["homology", "--d", "3"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "# pfh-twist-lab v1"
    for row in table(out):
        k = int(row["k"])
        assert int(row["rank"]) == (1 if k % 2 else 0)
        assert (row["minmax"] != "") == (k % 2 == 1)


def test_spectral_values_print_as_fractions(capsys):
    code, out, _ = run(["spectral", "--d", "2", "--k", "8"], capsys)
    assert code == 0 and table(out)[0]["value"] == "2/1"


def test_index_of_figure_path(capsys):
    code, out, _ = run(["index", "--path", "-2; (1,0)x1; (3,2)x1:H; (1,2)x2"], capsys)
    assert code == 0
    assert "I: -3" in out.splitlines() and "pick: crossing" in out.splitlines()


def test_usage_errors_exit_2(capsys):
    assert run(["index", "--path", "0; (0,1)x1"], capsys)[0] == 2
    assert run(["spectral", "--d", "0"], capsys)[0] == 2
    assert run(["nonsense"], capsys)[0] == 2
    assert run(["homology", "--d", "2", "--profile", "nope"], capsys)[0] == 2


def test_invariant_violation_exits_1(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"kind": "polynomial", "coefficients": ["0", "1", "1/2"], "hprime1": 3}))
    code, _, err = run(["profile", "check", str(bad)], capsys)
    assert code == 1
    assert json.loads(err.strip().splitlines()[-1])["violations"]


def test_profile_check_ok(tmp_path, capsys):
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"kind": "polynomial", "coefficients": ["0", "0", "1/2"], "hprime1": 2}))
    code, out, _ = run(["profile", "check", str(good)], capsys)
    assert code == 0 and "Cal: 1/3" in out


def test_output_file_and_config(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    target = tmp_path / "out.csv"
    cfg.write_text(json.dumps({"profile": "quadratic", "output": str(target), "note": "kept"}))
    code, out, _ = run(["spectrum", "--d", "1", "--window=-0.1,1.1", "--config", str(cfg)], capsys)
    assert code == 0 and out == ""
    text = target.read_text()
    assert [r["value"] for r in table(text)] == ["0/1", "3/4", "1/1"]
    assert "# min_gap 1/4" in text
    assert RunConfig.load(str(cfg)).extra == {"note": "kept"}


def test_bad_config_is_usage_error(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text("{not json")
    with pytest.raises(UsageError):
        RunConfig.load(str(cfg))
    with pytest.raises(UsageError):
        RunConfig(brute_cap=0).validate()


def test_fmt():
    from fractions import Fraction
    assert [fmt(Fraction(2)), fmt(0.1 + 0.2), fmt(None), fmt(True)] == ["2/1", "0.3", "", "true"]


def _cli(args, threads):
    env = dict(os.environ, PFH_THREADS=str(threads))
    return subprocess.run([sys.executable, "-m", "pfh_twist.cli", *args], capture_output=True, env=env,
                          check=True).stdout


@pytest.mark.parametrize("args", [
    ["converge", "--dmax", "30", "--d-list", "2,5,12,30"],
    ["infinite-twist", "--f", "power:-4", "--i", "1,2,4", "--d-list", "4,8"],
])
def test_thread_count_does_not_change_output(args):
    assert _cli(args, 1) == _cli(args, 4)


def test_selftest_passes(capsys):
    code, out, _ = run(["selftest"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines and all(ln.startswith("PASS ") for ln in lines if ln.startswith(("PASS", "FAIL")))
