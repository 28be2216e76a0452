"""Classification, pre-tau partitions and enumeration of predictable times."""

from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from src.core.shared.exceptions import (
    BudgetExceededError,
    NotPredictableError,
    ValidationError,
)
from src.engine.filtered_space import Partition
from src.engine.stopping_times import (
    StoppingClass,
    StoppingTime,
    classify,
    enumerate_predictable,
    in_class,
    is_predictable,
    lattice,
    pre_sigma,
    successor,
)
from src.services.instances import GeneratorParams, generate_random
from tests.conftest import const


def test_classify_on_gap_instance(e3):
    filt = e3.filtration
    assert classify(const(e3, 1), filt) is StoppingClass.PREDICTABLE
    # {tau = 1} = {u} is known at 1 but not before 1
    assert classify(StoppingTime.of([1, 2]), filt) is StoppingClass.STOPPING
    assert classify(StoppingTime.of([0, 1]), filt) is StoppingClass.NOT_STOPPING


def test_classify_rejects_out_of_range(e3):
    with pytest.raises(ValidationError):
        classify(StoppingTime.of([3, 3]), e3.filtration)
    with pytest.raises(ValidationError):
        classify(StoppingTime.of([1]), e3.filtration)


def test_pre_sigma_of_constants(e3):
    filt = e3.filtration
    assert pre_sigma(const(e3, 0), filt) == Partition.trivial(2)
    assert pre_sigma(const(e3, 1), filt) == Partition.trivial(2)
    # P_1 already splits u from d, and {tau > 1} is everything
    assert pre_sigma(const(e3, 2), filt) == Partition.discrete(2)


def test_pre_sigma_requires_predictable(e3):
    with pytest.raises(NotPredictableError) as excinfo:
        pre_sigma(StoppingTime.of([1, 2]), e3.filtration)
    assert excinfo.value.context["class"] == "stopping"


def test_enumerate_gap_instance(e3):
    times = enumerate_predictable(e3.filtration, const(e3, 0))
    assert [tau.time for tau in times] == [(0, 0), (1, 1), (2, 2)]
    strict = enumerate_predictable(e3.filtration, const(e3, 0), strict=True)
    assert [tau.time for tau in strict] == [(1, 1), (2, 2)]
    at_horizon = enumerate_predictable(e3.filtration, const(e3, 2), strict=True)
    assert [tau.time for tau in at_horizon] == [(2, 2)]


def test_enumerate_preslot_coin(e2):
    times = enumerate_predictable(e2.filtration, const(e2, 0))
    assert [tau.time for tau in times] == [(0, 0), (1, 1)]


def test_enumerate_respects_budget(e3):
    with pytest.raises(BudgetExceededError) as excinfo:
        enumerate_predictable(e3.filtration, const(e3, 0), budget=2)
    assert excinfo.value.exit_code == 3


def test_successor_and_class_membership(e3):
    S = const(e3, 1)
    assert successor(S, 2) == const(e3, 2)
    assert successor(const(e3, 2), 2) == const(e3, 2)
    assert in_class(const(e3, 2), S, 2, strict=True)
    assert not in_class(S, S, 2, strict=True)
    assert in_class(S, S, 2, strict=False)


@given(seed=st.integers(min_value=0, max_value=10_000), strict=st.booleans())
@settings(max_examples=40, deadline=None)
def test_enumeration_matches_exhaustive_search(seed, strict):
    instance = generate_random(seed, GeneratorParams(max_outcomes=4, horizon=2))
    filt = instance.filtration
    n = len(instance.space)
    grid = range(filt.horizon + 1)
    every = [StoppingTime(times) for times in product(grid, repeat=n)]
    predictable = [tau for tau in every if is_predictable(tau, filt)]
    for S in predictable:
        expected = sorted(
            tau.time
            for tau in predictable
            if in_class(tau, S, filt.horizon, strict)
        )
        found = [tau.time for tau in enumerate_predictable(filt, S, strict)]
        assert found == expected


@given(seed=st.integers(min_value=0, max_value=10_000))
@settings(max_examples=30, deadline=None)
def test_predictable_times_form_a_lattice(seed):
    instance = generate_random(seed, GeneratorParams(max_outcomes=3, horizon=2))
    filt = instance.filtration
    times = enumerate_predictable(filt, const(instance, 0))
    for first in times:
        for second in times:
            low, high = lattice(first, second)
            assert is_predictable(low, filt)
            assert is_predictable(high, filt)
