from fractions import Fraction

import pytest

from src.core.shared.exceptions import NotMeasurableError, NotPredictableError
from src.engine.filtered_space import RandomVar
from src.engine.reward import RewardFamily, eval_at, scale_by, validate_admissible
from src.engine.stopping_times import StoppingTime
from tests.conftest import const


def test_canonical_rewards_are_admissible(e1, e2, e3):
    for instance in (e1, e2, e3):
        assert validate_admissible(instance.reward, instance.filtration).ok


def test_reward_varying_on_pre_block_is_rejected(e3):
    # Q_1 is trivial on the gap instance, so phi_1 must not split u from d
    family = RewardFamily.of(
        [RandomVar.of([0, 0]), RandomVar.of([1, 2]), RandomVar.of([3, 0])]
    )
    report = validate_admissible(family, e3.filtration)
    finding = report.first()
    assert finding.code == "not_measurable"
    assert finding.context["t"] == 1
    assert finding.context["block"] == ["u", "d"]
    assert finding.context["witness_tau"] == {"u": 1, "d": 1}


def test_negative_and_misshaped_rewards(e3):
    negative = RewardFamily.of(
        [RandomVar.of([0, 0]), RandomVar.of([-1, -1]), RandomVar.of([3, 0])]
    )
    finding = validate_admissible(negative, e3.filtration).first()
    assert finding.code == "negative_reward"
    short = RewardFamily.of([RandomVar.of([0, 0])])
    assert validate_admissible(short, e3.filtration).first().code == "reward_arity"


def test_eval_at(e3):
    assert eval_at(e3.reward, const(e3, 2), e3.filtration).values == (3, 0)
    assert eval_at(e3.reward, const(e3, 1), e3.filtration).values == (1, 1)
    with pytest.raises(NotPredictableError):
        eval_at(e3.reward, StoppingTime.of([1, 2]), e3.filtration)


def test_scale_by_zeroes_reward_before_start(e3):
    alpha = RandomVar.of([1, Fraction(1, 2)])
    scaled = scale_by(e3.reward, alpha, const(e3, 2), e3.filtration)
    assert [phi.values for phi in scaled.per_time] == [(0, 0), (0, 0), (3, 0)]


def test_scale_by_requires_factor_known_before_start(e3):
    with pytest.raises(NotMeasurableError):
        scale_by(e3.reward, RandomVar.of([1, 0]), const(e3, 1), e3.filtration)
