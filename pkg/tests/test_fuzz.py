import json

import pytest

from src.services import fuzz
from src.services.fuzz import run_fuzz, run_seed
from src.services.instances import GeneratorParams, load
from src.services.propcheck import run_suite

PARAMS = GeneratorParams(max_outcomes=3, horizon=2)


def test_fuzz_small_range_passes(tmp_path):
    summary = run_fuzz(5, PARAMS, start_seed=10, workers=1, out_dir=tmp_path)
    assert summary.ok
    assert summary.seeds == list(range(10, 15))
    assert summary.to_dict()["passed"] == 5
    assert list(tmp_path.iterdir()) == []


def test_run_seed_is_reproducible():
    first = run_seed(3, PARAMS, 20_000, 250_000)
    second = run_seed(3, PARAMS, 20_000, 250_000)
    assert first == second
    assert first.failed == ()


def test_failing_seed_writes_instance_and_witness(tmp_path, monkeypatch):
    def failing_suite(instance, **kwargs):
        report = run_suite(instance, props=["value-reward-strict-max"])
        report.results[0].status = fuzz.Status.FAIL
        report.results[0].witness = {"note": "forced"}
        return report

    monkeypatch.setattr(fuzz, "run_suite", failing_suite)
    summary = run_fuzz(1, PARAMS, start_seed=4, workers=1, out_dir=tmp_path)
    assert not summary.ok
    assert sorted(p.name for p in tmp_path.iterdir()) == [
        "seed-4.json",
        "seed-4.witness.json",
    ]
    witness = json.loads((tmp_path / "seed-4.witness.json").read_text())
    assert witness["properties"][0]["id"] == "value-reward-strict-max"
    assert load(tmp_path / "seed-4.json").name == "random-4"


@pytest.mark.slow
def test_fuzz_500_instances_in_parallel():
    summary = run_fuzz(500, GeneratorParams(max_outcomes=5, horizon=3), workers=0)
    assert summary.ok, summary.to_dict()["failed"]
