"""Instance documents, canonical fixtures and the random generator."""

import json
from fractions import Fraction

import pytest

from src.core.shared.exceptions import (
    NotFoundError,
    NotPredictableError,
    SchemaError,
    ValidationError,
)
from src.engine.snell import value_backward
from src.services.instances import (
    GeneratorParams,
    canonical,
    dumps,
    generate_random,
    load,
    loads,
    parse_stopping_time,
    save,
)


def _document(instance) -> dict:
    return json.loads(dumps(instance))


def test_canonical_aliases(e1, e2, e3):
    assert canonical("deterministic") == e1
    assert canonical("preslot-coin") == e2
    assert canonical(" gap ") == e3
    with pytest.raises(NotFoundError):
        canonical("E9")


def test_save_then_load_keeps_bytes(tmp_path, e3):
    first = tmp_path / "first.json"
    second = tmp_path / "second.json"
    save(e3, first)
    save(load(first), second)
    assert first.read_bytes() == second.read_bytes()
    assert load(second).digest == e3.digest


def test_digest_ignores_name(e3):
    data = _document(e3)
    data["name"] = "renamed"
    assert loads(json.dumps(data)).digest == e3.digest


def test_decimal_probability_is_a_schema_error(e3):
    data = _document(e3)
    data["outcomes"][0]["prob"] = "0.5"
    with pytest.raises(SchemaError) as excinfo:
        loads(json.dumps(data))
    assert excinfo.value.pointer == "/outcomes/0/prob"
    assert excinfo.value.exit_code == 2


def test_unknown_outcome_in_block_is_a_schema_error(e3):
    data = _document(e3)
    data["filtration"][1]["post"] = [["u"], ["x"]]
    with pytest.raises(SchemaError) as excinfo:
        loads(json.dumps(data))
    assert excinfo.value.pointer == "/filtration/1/post/1/0"


def test_repeated_outcome_in_block_is_a_schema_error(e3):
    data = _document(e3)
    data["filtration"][1]["post"] = [["u", "u"], ["d"]]
    with pytest.raises(SchemaError) as excinfo:
        loads(json.dumps(data))
    assert excinfo.value.pointer == "/filtration/1/post/0/1"
    assert "repeated" in excinfo.value.detail


def test_missing_reward_slot_is_a_schema_error(e3):
    data = _document(e3)
    data["reward"] = data["reward"][:2]
    with pytest.raises(SchemaError) as excinfo:
        loads(json.dumps(data))
    assert excinfo.value.pointer == "/reward"


def test_invalid_json_is_a_schema_error():
    with pytest.raises(SchemaError):
        loads("{not json")


def test_probabilities_must_sum_to_one(e3):
    data = _document(e3)
    data["outcomes"][1]["prob"] = "1/3"
    with pytest.raises(ValidationError) as excinfo:
        loads(json.dumps(data))
    assert "sum to 5/6" in excinfo.value.detail


def test_unmeasurable_reward_names_the_witness(e3):
    data = _document(e3)
    data["reward"][1]["values"] = {"u": "1", "d": "2"}
    with pytest.raises(ValidationError) as excinfo:
        loads(json.dumps(data))
    violation = excinfo.value.context["violations"][0]
    assert violation["code"] == "not_measurable"
    assert violation["witness_tau"] == {"u": 1, "d": 1}


def test_missing_file_is_not_found(tmp_path):
    with pytest.raises(NotFoundError):
        load(tmp_path / "missing.json")


def test_generator_is_deterministic():
    params = GeneratorParams(max_outcomes=4, horizon=3)
    assert dumps(generate_random(7, params)) == dumps(generate_random(7, params))
    assert generate_random(7, params).name == "random-7"


@pytest.mark.parametrize("seed", range(20))
def test_generator_without_qlc_violations_has_equal_slots(seed):
    instance = generate_random(seed, GeneratorParams(qlc_violation_prob=0.0))
    filt = instance.filtration
    assert all(filt.pre[t] == filt.post[t] for t in filt.times if t > 0)
    coarse_start = [0] if len(filt.post[0]) > 1 else []
    assert filt.qlc_failures() == coarse_start


@pytest.mark.parametrize("seed", range(10))
def test_single_outcome_value_is_best_reward(seed):
    instance = generate_random(seed, GeneratorParams(max_outcomes=1, horizon=3))
    vs = value_backward(instance.reward, instance.filtration)
    assert vs.v[0][0] == max(phi[0] for phi in instance.reward.per_time)


def test_generator_rejects_bad_params():
    with pytest.raises(ValidationError):
        GeneratorParams(qlc_violation_prob=1.5)
    with pytest.raises(ValidationError):
        GeneratorParams(max_outcomes=0)


def test_parse_stopping_time(e3):
    assert parse_stopping_time(1, e3).time == (1, 1)
    assert parse_stopping_time(" 2 ", e3).time == (2, 2)
    assert parse_stopping_time('{"u": 0, "d": 0}', e3).time == (0, 0)
    with pytest.raises(NotPredictableError):
        parse_stopping_time({"u": 1, "d": 2}, e3)
    with pytest.raises(ValidationError):
        parse_stopping_time({"u": 1}, e3)
    with pytest.raises(ValidationError):
        parse_stopping_time("soon", e3)
    with pytest.raises(ValidationError):
        parse_stopping_time(5, e3)


def test_rationals_survive_the_document(e3):
    loaded = loads(dumps(e3))
    assert loaded.space.prob == (Fraction(1, 2), Fraction(1, 2))
    assert loaded.reward[2].values == (3, 0)


def test_preslot_coin_with_coarsened_pre_partition_is_rejected(e2):
    data = _document(e2)
    data["filtration"][1]["pre"] = [["u", "d"]]
    with pytest.raises(ValidationError) as excinfo:
        loads(json.dumps(data))
    violation = excinfo.value.context["violations"][0]
    assert violation["code"] == "not_measurable"
    assert (violation["t"], violation["block"]) == (1, ["u", "d"])
