import json

import pytest

from walshlab.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def strip_timestamps(text):
    lines = []
    for line in text.strip().split("\n"):
        rec = json.loads(line)
        rec.pop("timestamp", None)
        lines.append(json.dumps(rec, sort_keys=True))
    return "\n".join(lines)


def test_decompose_subcommand(capsys):
    code, out = run_cli(capsys, "decompose", "--a", "1", "--b", "6")
    assert code == 0
    payload = json.loads(out)
    assert payload["anchor"] == 1
    assert payload["left"] == [{"level": 2, "lo": 2, "hi": 4}]
    assert payload["right"] == [{"level": 2, "lo": 4, "hi": 6}]
    assert payload["checks"]["passed"]


def test_scalar_subcommand_exit_codes(capsys):
    code, out = run_cli(
        capsys, "scalar", "--resolution", "6", "--trials", "10", "--seed", "1",
        "--p", "2",
    )
    assert code == 0
    summary = json.loads(out.strip().split("\n")[-1])
    assert summary["passed"]
    assert summary["config"]["kind"] == "scalar"


def test_cli_determinism_excluding_timestamp(capsys):
    args = ("scalar", "--resolution", "6", "--trials", "8", "--seed", "3", "--p", "4")
    _, out1 = run_cli(capsys, *args)
    _, out2 = run_cli(capsys, *args)
    assert strip_timestamps(out1) == strip_timestamps(out2)


def test_cli_writes_files(tmp_path, capsys):
    out_json = tmp_path / "report.jsonl"
    code, _ = run_cli(
        capsys, "pointwise", "--resolution", "6", "--trials", "5",
        "--out", str(out_json),
    )
    assert code == 0
    lines = out_json.read_text().strip().split("\n")
    assert len(lines) == 6  # five trials plus the summary object

    out_csv = tmp_path / "report.csv"
    code, _ = run_cli(
        capsys, "scalar", "--resolution", "5", "--trials", "4",
        "--out", str(out_csv), "--format", "csv",
    )
    assert code == 0
    header = out_csv.read_text().split("\n")[0]
    assert "config.resolution" in header


def test_verify_identities_subcommand(capsys):
    code, out = run_cli(
        capsys, "verify-identities", "--resolution", "6", "--trials", "5",
        "--seed", "2",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["passed"]


def test_czd_subcommand(capsys):
    code, out = run_cli(
        capsys, "czd", "--lambda", "2.0", "--resolution", "6", "--dim", "2",
        "--q", "2", "--seed", "4",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["passed"]
    assert payload["config"]["lam"] == 2.0


def test_env_var_seed(monkeypatch, capsys):
    monkeypatch.setenv("LPR_SEED", "77")
    code, out = run_cli(capsys, "scalar", "--resolution", "5", "--trials", "3")
    assert code == 0
    summary = json.loads(out.strip().split("\n")[-1])
    assert summary["config"]["seed"] == 77


def test_adjoint_subcommand(capsys):
    code, out = run_cli(
        capsys, "adjoint", "--resolution", "6", "--trials", "5", "--dim", "2",
        "--count", "3",
    )
    assert code == 0


def test_unknown_command_rejected():
    with pytest.raises(SystemExit):
        main(["frobnicate"])
