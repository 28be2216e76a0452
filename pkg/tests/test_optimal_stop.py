"""Penalized times, first contact, the optimality criterion and the optimal set."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from src.core.shared.exceptions import BadRequestError
from src.engine.decomposition import decompose
from src.engine.optimal_stop import (
    criterion_check,
    flat_before_penalized,
    martingale_interval,
    martingale_interval_pairwise,
    optimal_report,
    optimal_set,
    penalized_set,
    representation_check,
    stationarity_threshold,
    tau_alpha,
    tau_hat,
)
from src.engine.snell import value_backward
from src.engine.stopping_times import enumerate_predictable
from src.services.instances import GeneratorParams, generate_random
from tests.conftest import const


def test_gap_penalized_times(e3, vs3):
    S = const(e3, 0)
    assert tau_alpha(vs3, S, Fraction(1, 4)) == const(e3, 1)
    assert tau_alpha(vs3, S, Fraction(1, 2)) == const(e3, 1)
    assert tau_alpha(vs3, S, Fraction(3, 4)) == const(e3, 2)
    assert tau_hat(vs3, S) == const(e3, 2)
    assert stationarity_threshold(vs3, S) == Fraction(2, 3)


@pytest.mark.parametrize("alpha", [Fraction(0), Fraction(1), Fraction(3, 2)])
def test_tau_alpha_rejects_alpha_outside_unit_interval(e3, vs3, alpha):
    with pytest.raises(BadRequestError):
        tau_alpha(vs3, const(e3, 0), alpha)


def test_penalized_set_minimum_is_tau_alpha(e3, vs3):
    members = penalized_set(vs3, const(e3, 0), Fraction(1, 2))
    assert [tau.time for tau in members] == [(1, 1), (2, 2)]


def test_criterion_on_gap(e3, vs3):
    S = const(e3, 0)
    optimal = criterion_check(vs3, S, const(e3, 2))
    assert optimal.optimal and optimal.cond1 and optimal.cond2
    assert optimal.expected == Fraction(3, 2)
    early = criterion_check(vs3, S, const(e3, 1))
    assert not early.optimal
    assert not early.cond1
    assert early.to_dict()["expected"] == "1"
    assert early.to_dict()["best"] == "3/2"


def test_optimal_set_on_deterministic(e1, vs1):
    S = const(e1, 0)
    chosen = optimal_set(vs1, S)
    assert [tau.time for tau in chosen.members] == [(0,), (1,)]
    assert chosen.tau_tilde == const(e1, 1)
    assert martingale_interval(vs1, S, const(e1, 1))
    assert not martingale_interval(vs1, S, const(e1, 2))
    assert martingale_interval_pairwise(vs1, S, const(e1, 1))
    assert not martingale_interval_pairwise(vs1, S, const(e1, 2))


def test_optimal_report_on_gap(e3, vs3):
    report = optimal_report(vs3, const(e3, 0))
    assert report.optimal_value == Fraction(3, 2)
    assert report.tau_hat == const(e3, 2)
    assert report.alpha_star == Fraction(2, 3)
    assert report.attained_by == (const(e3, 2),)
    assert report.tau_tilde == const(e3, 2)
    assert report.criterion.optimal
    assert report.representation.ok


def test_first_contact_at_start_on_preslot_coin(e2, vs2):
    report = optimal_report(vs2, const(e2, 0))
    assert report.tau_hat == const(e2, 0)
    assert report.alpha_star == 0
    assert report.optimal_value == 1
    assert set(report.attained_by) == {const(e2, 0), const(e2, 1)}
    assert representation_check(vs2, const(e2, 0)).details["h_plus_mass"] == "0"


@pytest.mark.property_based
@given(seed=st.integers(min_value=0, max_value=100_000))
@settings(max_examples=40, deadline=None)
def test_first_contact_is_optimal_and_stationary(seed):
    instance = generate_random(seed, GeneratorParams(max_outcomes=4, horizon=2))
    filt = instance.filtration
    vs = value_backward(instance.reward, filt)
    d = decompose(vs)
    for S in enumerate_predictable(filt, const(instance, 0)):
        report = optimal_report(vs, S)
        assert report.tau_hat in report.attained_by
        assert report.criterion.optimal
        assert report.representation.ok
        threshold = report.alpha_star
        assert tau_alpha(vs, S, (threshold + 1) / 2) == report.tau_hat
        assert all(check.ok for check in flat_before_penalized(d, S))
