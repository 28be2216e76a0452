"""Value system by backward induction, checked against brute force."""

import time
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from src.core.shared.exceptions import NotMeasurableError
from src.engine.filtered_space import RandomVar
from src.engine.snell import (
    check_supermartingale_system,
    classical_value_backward,
    expected_reward,
    localized_value,
    optimizing_sequence,
    scaled_value,
    value_at,
    value_backward,
    value_bruteforce,
    value_plus_at,
)
from src.engine.stopping_times import enumerate_predictable
from src.services.instances import GeneratorParams, generate_random
from tests.conftest import const, values

half = Fraction(1, 2)


def test_deterministic_values(e1, vs1):
    assert [values(x) for x in vs1.v] == [[3], [3], [2]]
    assert [values(x) for x in vs1.v_plus] == [[3], [2], [2]]
    classical = classical_value_backward(e1.reward, e1.filtration)
    assert [values(x) for x in classical] == [[3], [3], [2]]
    assert vs1.contact(1) == frozenset({0})
    assert vs1.contact(0) == frozenset()


def test_preslot_coin_values(vs2):
    assert values(vs2.v[0]) == [1, 1]
    assert values(vs2.v_plus[0]) == [1, 1]
    assert values(vs2.v[1]) == [2, 0]


def test_gap_values_stay_below_classical(e3, vs3):
    assert values(vs3.v[0]) == [3 * half, 3 * half]
    assert values(vs3.v[1]) == [3 * half, 3 * half]
    assert values(vs3.v_plus[1]) == [3 * half, 3 * half]
    classical = classical_value_backward(e3.reward, e3.filtration)
    assert values(classical[1]) == [3, 1]
    assert e3.space.expectation(classical[0]) == 2
    assert e3.space.expectation(vs3.v[0]) == 3 * half


def test_bruteforce_on_canonical(e1, e2, e3, vs1, vs2, vs3):
    for instance, vs in ((e1, vs1), (e2, vs2), (e3, vs3)):
        for t in instance.filtration.times:
            S = const(instance, t)
            oracle = value_bruteforce(instance.reward, instance.filtration, S)
            assert oracle == value_at(vs, S)


def test_expected_rewards_on_gap(e3):
    expected = [
        expected_reward(e3.reward, e3.filtration, const(e3, t)) for t in range(3)
    ]
    assert expected == [0, 1, 3 * half]


def test_value_is_supermartingale_system_but_not_martingale(e1, vs1):
    assert check_supermartingale_system(vs1.v, e1.filtration).ok
    report = check_supermartingale_system(vs1.v, e1.filtration, martingale=True)
    finding = report.first()
    assert finding.context["tau"] == {"omega": 0}
    assert finding.context["tau_prime"] == {"omega": 2}
    assert (finding.context["lhs"], finding.context["rhs"]) == ("2", "3")


def test_supermartingale_check_rejects_unmeasurable_system(e3):
    u = [RandomVar.of([1, 1]), RandomVar.of([2, 0]), RandomVar.of([0, 0])]
    report = check_supermartingale_system(u, e3.filtration)
    assert report.first().code == "not_measurable"
    assert report.first().context["t"] == 1


def test_optimizing_sequence_reaches_value(e3, vs3):
    sequence = optimizing_sequence(e3.reward, e3.filtration, const(e3, 0))
    assert [tau.time for tau in sequence.times] == [(0, 0), (1, 1), (2, 2)]
    assert sequence.terminal == value_at(vs3, const(e3, 0))


def test_localized_value(e3, vs3):
    on_u = localized_value(vs3, {0}, const(e3, 2))
    assert on_u(const(e3, 2)).values == (3, 0)
    scaled = scaled_value(vs3, RandomVar.of([half, 1]), const(e3, 2))
    assert scaled(const(e3, 2)).values == (3 * half, 0)
    with pytest.raises(NotMeasurableError):
        localized_value(vs3, {0}, const(e3, 0))


@pytest.mark.property_based
@given(seed=st.integers(min_value=0, max_value=100_000))
@settings(max_examples=60, deadline=None)
def test_backward_induction_matches_bruteforce(seed):
    instance = generate_random(seed, GeneratorParams(max_outcomes=4, horizon=2))
    filt = instance.filtration
    system = value_backward(instance.reward, filt)
    for S in enumerate_predictable(filt, const(instance, 0)):
        assert value_at(system, S) == value_bruteforce(instance.reward, filt, S)
        strict = value_bruteforce(instance.reward, filt, S, strict=True)
        assert value_plus_at(system, S) == strict


@pytest.mark.slow
@pytest.mark.property_based
def test_backward_induction_matches_bruteforce_on_500_instances():
    started = time.perf_counter()
    for seed in range(500):
        instance = generate_random(seed, GeneratorParams(max_outcomes=5, horizon=3))
        filt = instance.filtration
        system = value_backward(instance.reward, filt)
        for S in enumerate_predictable(filt, const(instance, 0)):
            oracle = value_bruteforce(instance.reward, filt, S)
            assert value_at(system, S) == oracle, seed
    assert time.perf_counter() - started < 60
