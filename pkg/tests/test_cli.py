"""Command line: output formats and exit codes."""

import json

import pytest
from click.testing import CliRunner

from src.cli import cli


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


def invoke(runner, *args):
    return runner.invoke(cli, [str(a) for a in args])


def files_in(directory):
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir())}


def test_solve_json(runner, instance_files):
    result = invoke(runner, "solve", instance_files["E1"], "--format", "json")
    assert result.exit_code == 0, result.output
    data = json.loads(result.stdout)
    assert data["value"][0] == {"t": 0, "values": {"omega": "3"}}
    assert data["value_plus"][1] == {"t": 1, "values": {"omega": "2"}}
    assert data["optimal_value"] == "3"
    assert data["tau_hat"] == {"omega": 1}


def test_solve_gap_reports_classical_value(runner, instance_files):
    result = invoke(runner, "solve", instance_files["E3"], "--format", "json")
    data = json.loads(result.stdout)
    assert data["optimal_value"] == "3/2"
    assert data["classical_optimal_value"] == "2"
    assert data["alpha_star"] == "2/3"
    assert data["tau_alpha"]["1/2"] == {"u": 1, "d": 1}
    assert data["qlc_failures"] == [1]


def test_solve_csv_and_table(runner, instance_files):
    result = invoke(
        runner, "solve", instance_files["E1"], "--format", "csv", "--series", "V+"
    )
    assert result.exit_code == 0
    assert result.stdout.splitlines() == [
        "time,outcome,value",
        "0,omega,3",
        "1,omega,2",
        "2,omega,2",
    ]
    table = invoke(runner, "solve", instance_files["E3"])
    assert table.exit_code == 0
    assert "optimal value: 3/2" in table.stdout


def test_solve_from_map_start(runner, instance_files):
    at = '{"u": 2, "d": 2}'
    result = invoke(
        runner, "solve", instance_files["E3"], "--at", at, "--format", "json"
    )
    assert result.exit_code == 0
    assert json.loads(result.stdout)["value_at_s"] == {"u": "3", "d": "0"}


def test_solve_rejects_unpredictable_start(runner, instance_files):
    result = invoke(runner, "solve", instance_files["E3"], "--at", '{"u": 1, "d": 2}')
    assert result.exit_code == 2
    assert "not predictable" in result.stderr


def test_decimal_probability_exits_2(runner, tmp_path, instance_files):
    bad = tmp_path / "bad.json"
    bad.write_text(instance_files["E3"].read_text().replace('"1/2"', '"0.5"'))
    result = invoke(runner, "solve", bad)
    assert result.exit_code == 2
    assert "/outcomes/0/prob" in result.stderr
    assert result.stdout == ""


def test_verify_passes_on_gap(runner, instance_files):
    result = invoke(runner, "verify", instance_files["E3"])
    assert result.exit_code == 0, result.output
    data = json.loads(result.stdout)
    assert data["summary"]["fail"] == 0
    assert not any(p.get("partial") for p in data["properties"])


def test_verify_selected_properties_as_table(runner, instance_files):
    result = invoke(
        runner,
        "verify",
        instance_files["E1"],
        "--props",
        "oracle-equivalence,value-recursion",
        "--format",
        "table",
    )
    assert result.exit_code == 0
    assert "oracle-equivalence" in result.stdout
    assert "contact-trichotomy" not in result.stdout


def test_verify_sample_limit_marks_partial(runner, instance_files):
    path = instance_files["E3"]
    result = invoke(
        runner,
        "verify",
        path,
        "--props",
        "strict-value-bound",
        "--sample-limit",
        1,
    )
    assert result.exit_code == 0, result.output
    (entry,) = json.loads(result.stdout)["properties"]
    assert entry["status"] == "pass"
    assert entry["partial"] is True
    assert invoke(runner, "verify", path, "--sample-limit", 0).exit_code == 2


def test_verify_budget_exit_codes(runner, instance_files):
    result = invoke(runner, "verify", instance_files["E3"], "--check-budget", 1)
    assert result.exit_code == 0
    strict = invoke(
        runner, "verify", instance_files["E3"], "--check-budget", 1, "--strict-budget"
    )
    assert strict.exit_code == 3


def test_verify_unknown_property_exits_2(runner, instance_files):
    result = invoke(runner, "verify", instance_files["E3"], "--props", "nope")
    assert result.exit_code == 2


def test_enumerate_gap(runner, instance_files):
    result = invoke(runner, "enumerate", instance_files["E3"], "--from", "0")
    assert result.exit_code == 0
    data = json.loads(result.stdout)
    assert data["count"] == 3
    assert [row["expected"] for row in data["times"]] == ["0", "1", "3/2"]


def test_enumerate_strict_csv(runner, instance_files):
    result = invoke(
        runner, "enumerate", instance_files["E3"], "--strict", "--format", "csv"
    )
    assert result.stdout.splitlines() == ["u,d,E[phi(tau)]", "1,1,1", "2,2,3/2"]


def test_enumerate_over_budget_exits_3(runner, instance_files):
    result = invoke(runner, "enumerate", instance_files["E3"], "--budget", 2)
    assert result.exit_code == 3


def test_decompose(runner, instance_files):
    result = invoke(runner, "decompose", instance_files["E1"], "--format", "json")
    data = json.loads(result.stdout)
    assert [row["values"]["omega"] for row in data["m"]] == ["3", "3", "3"]
    assert [row["values"]["omega"] for row in data["delta_c"]] == ["0", "1", "0"]
    assert data["c"][0]["t"] == -1
    csv = invoke(
        runner, "decompose", instance_files["E1"], "--format", "csv", "--series", "dC"
    )
    assert csv.stdout.splitlines()[2] == "1,omega,1"


def test_generate_and_canonical(runner, tmp_path):
    first = invoke(runner, "generate", "--seed", 11)
    second = invoke(runner, "generate", "--seed", 11)
    assert first.exit_code == 0
    assert first.stdout == second.stdout
    out = tmp_path / "e2.json"
    result = invoke(runner, "canonical", "preslot-coin", "--out", out)
    assert result.exit_code == 0
    assert json.loads(out.read_text())["name"] == "E2"
    assert invoke(runner, "canonical", "E9").exit_code == 2


def test_fuzz_small(runner, tmp_path):
    result = invoke(
        runner,
        "fuzz",
        "--seeds",
        3,
        "--max-outcomes",
        3,
        "--workers",
        1,
        "--out",
        tmp_path,
    )
    assert result.exit_code == 0, result.output
    assert json.loads(result.stdout)["passed"] == 3


@pytest.mark.parametrize(
    "command",
    [
        ["solve", "{E3}", "--format", "json"],
        ["verify", "{E2}"],
        ["fuzz", "--seeds", "1", "--workers", "1", "--out", "{out}"],
    ],
    ids=["solve", "verify", "fuzz"],
)
def test_commands_are_deterministic(runner, tmp_path, instance_files, command):
    runs = []
    for k in range(2):
        out = tmp_path / f"out-{k}"
        args = [
            a.format(E2=instance_files["E2"], E3=instance_files["E3"], out=out)
            for a in command
        ]
        result = invoke(runner, *args)
        assert result.exit_code == 0, result.output
        written = files_in(out) if out.is_dir() else None
        runs.append((result.stdout.replace(str(out), "<out>"), written))
    assert runs[0] == runs[1]
    if command[0] == "fuzz":
        assert runs[0][1] is not None
