import csv
import io
import json
import subprocess
import sys

import pytest

from renewal_lab import checks
from renewal_lab.cli import main
from renewal_lab.renewal import RenewalSeq


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_poly_examples(capsys):
    assert run(capsys, "poly", "P", "--l", "2", "--k", "3")[1] == "1 * p1^2 + 1 * p2\n"
    assert run(capsys, "poly", "Q", "--n", "3", "--k", "3")[1] == "1 * p1^2 + 1 * p1 * p2\n"
    out = run(capsys, "poly", "P", "--l", "3", "--k", "5", "--form", "composition")[1]
    assert out == "1 * p1^3 + 2 * p1 * p2 + 1 * p3\n"


def test_compute_text(capsys):
    code, out, _ = run(capsys, "compute", "--masses", "1/2,1/2", "--n", "4")
    assert code == 0 and "11/16" in out and "limit 1/E[X] = 2/3" in out


def test_compute_periodic_note(capsys):
    code, out, _ = run(capsys, "compute", "--masses", "0,1", "--n", "4")
    assert code == 0 and "no Blackwell limit" in out


def test_compute_csv_columns(capsys):
    code, out, _ = run(capsys, "compute", "--masses", "1/2,1/4,1/4", "--n", "6", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["n", "u_n", "b_n", "c_n"] and len(rows) == 8
    assert rows[1][1] == "1" and rows[4][2] != ""


def test_json_schema(capsys):
    code, out, _ = run(capsys, "extremes", "--masses", "1/3,1/3,1/3", "--horizon", "60", "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert set(data) == {"schema_version", "command", "config", "reproduce", "result"}
    assert data["schema_version"] == "1" and data["command"] == "extremes"
    assert data["result"]["M"] == "16/27" and data["result"]["window"]["holds"]
    assert data["reproduce"].startswith("renewal-lab extremes")


@pytest.mark.parametrize(
    "argv",
    [
        ["compute", "--masses", "0.5,0.5"],
        ["compute", "--masses", "1/2,1/4"],
        ["compute", "--masses=-1/2,3/2"],
        ["extremes", "--masses", "0,1", "--horizon", "10"],
        ["poly", "P", "--k", "3"],
        ["probe", "--k", "7", "--grid", "4"],
        ["classes", "--k", "3", "--poly", "1 * p1 + 1 * p7"],
        ["demo", "no-largest", "--k", "2"],
        ["poly", "P", "--l", "2", "--k", "3", "--format", "csv"],
    ],
)
def test_invalid_input_exit_two(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == "" and err.startswith("error:")


def test_usage_error_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["compute"])
    assert exc.value.code == 2


def test_classes(capsys):
    code, out, _ = run(capsys, "classes", "--k", "3", "--poly", "1 * p1^2", "--grid", "8")
    assert code == 0 and "A class: not-falsified" in out and "A-hat class: certified-out" in out


def test_probe_json(capsys):
    code, out, _ = run(capsys, "probe", "--k", "3", "--grid", "8")
    res = json.loads(out)["result"]
    assert code == 0 and res["exact_recheck"]["verdict"] == "clean"
    assert res["candidate"] == res["q_k"]


def test_demo(capsys):
    code, out, _ = run(capsys, "demo", "no-largest", "--scan", "16")
    assert code == 0 and "region 1" in out and "region 2" in out


def test_mc_pass_and_fail(capsys):
    code, out, _ = run(capsys, "mc", "--masses", "1/2,1/2", "--n", "10", "--walks", "5000")
    assert code == 0 and out.rstrip().endswith(")") and "pass" in out
    # an absurd z threshold forces a failure
    code, out, _ = run(capsys, "mc", "--masses", "1/2,1/2", "--n", "10", "--walks", "5000", "--z", "0")
    assert code == 1 and "FAIL" in out


def test_mc_csv(capsys):
    code, out, _ = run(capsys, "mc", "--masses", "1/3,2/3", "--n", "5", "--walks", "2000", "--format", "csv")
    assert list(csv.reader(io.StringIO(out)))[0] == ["n", "u_exact", "u_hat", "stderr", "z_score"]


def test_verify_all_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["verify-all", "--budget", "tiny", "--seed", "42", "-o", str(a)]) == 0
    assert main(["verify-all", "--budget", "tiny", "--seed", "42", "--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    data = json.loads(a.read_text())
    assert data["result"]["passed"] and len(data["result"]["results"]) == len(checks.SUITE)


def test_verify_all_catches_broken_recurrence(monkeypatch, capsys):
    real = checks.compute_renewal

    def off_by_one(m, n_max):
        seq = real(m, n_max)
        nums = list(seq.numerators)
        if len(nums) > 3:
            nums[3] += 1
        return RenewalSeq(seq.masses, seq.n_max, tuple(nums), seq.denominator)

    monkeypatch.setattr(checks, "compute_renewal", off_by_one)
    code, out, _ = run(capsys, "verify-all", "--budget", "tiny")
    data = json.loads(out)
    assert code == 1 and not data["result"]["passed"]
    failed = {r["name"] for r in data["result"]["results"] if not r["passed"]}
    assert "recurrence_oracle" in failed


def test_pure_python_backend_subprocess():
    env = {"RENEWAL_LAB_PURE_PYTHON": "1", "PATH": ""}
    code = "from renewal_lab import _backend; print(_backend.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_module_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "renewal_lab.cli", "poly", "Q", "--n", "2", "--k", "3"],
        capture_output=True,
        text=True,
    )
    assert out.returncode == 0 and out.stdout == "1 * p1\n"
