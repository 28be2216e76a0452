"""
Admissible Predictable Reward Families

A reward family is process-backed: phi(tau)(w) = phi_{tau(w)}(w). Consistency
on {tau = tau'} therefore holds identically, and admissibility reduces to
phi_t being measurable for the pre-partition Q_t.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Tuple

from src.core.shared.exceptions import (
    EngineInvariantError,
    NotMeasurableError,
    ValidationError,
)
from src.engine.checks import CheckReport
from src.engine.filtered_space import RandomVar, TwoSlotFiltration, is_measurable
from src.engine.stopping_times import (
    StoppingTime,
    evaluate,
    pre_sigma,
    require_predictable,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RewardFamily:
    per_time: Tuple[RandomVar, ...]

    @classmethod
    def of(cls, per_time: Iterable[RandomVar]) -> RewardFamily:
        return cls(tuple(per_time))

    @classmethod
    def constant(cls, n: int, horizon: int, c: Fraction | int) -> RewardFamily:
        return cls(tuple(RandomVar.constant(n, c) for _ in range(horizon + 1)))

    @property
    def horizon(self) -> int:
        return len(self.per_time) - 1

    def __getitem__(self, t: int) -> RandomVar:
        return self.per_time[t]

    def __len__(self) -> int:
        return len(self.per_time)

    def times(self, factor: RandomVar) -> RewardFamily:
        """Pointwise product alpha * phi_t at every time."""
        return RewardFamily(tuple(factor * phi for phi in self.per_time))


def validate_admissible(fam: RewardFamily, filt: TwoSlotFiltration) -> CheckReport:
    """Every phi_t must be nonnegative and constant on each pre-block of Q_t.

    A failure at (t, block) is witnessed by the constant predictable time
    tau = t, whose pre-tau sigma-algebra is exactly Q_t.
    """
    report = CheckReport("validate_admissible")
    space = filt.space
    if len(fam) != filt.horizon + 1:
        report.add(
            "reward_arity",
            f"expected {filt.horizon + 1} reward slots, got {len(fam)}",
        )
        return report
    for t, phi in enumerate(fam.per_time):
        if len(phi) != len(space):
            report.add(
                "reward_length",
                f"reward at t={t} has {len(phi)} values for {len(space)} outcomes",
                t=t,
            )
            continue
        negative = phi.first_violation(0, lambda a, b: a >= b)
        if negative is not None:
            report.add(
                "negative_reward",
                f"reward at t={t} is negative at {space.outcomes[negative]!r}",
                t=t,
                outcome=space.outcomes[negative],
            )
        for block in filt.pre[t].blocks:
            seen = {phi[w] for w in block}
            if len(seen) > 1:
                ids = space.ids(block)
                report.add(
                    "not_measurable",
                    f"reward at t={t} varies on pre-block {{{', '.join(ids)}}}; "
                    f"phi(tau) is not measurable before tau = const {t}",
                    t=t,
                    block=ids,
                    witness_tau={o: t for o in space.outcomes},
                )
    return report


def eval_at(fam: RewardFamily, tau: StoppingTime, filt: TwoSlotFiltration) -> RandomVar:
    """phi(tau), checked to be measurable before tau."""
    require_predictable(tau, filt)
    value = evaluate(fam.per_time, tau)
    if not is_measurable(value, pre_sigma(tau, filt)):
        raise NotMeasurableError(
            detail=(
                "phi(tau) is not measurable before "
                f"tau = {tau.describe(filt.space)}"
            ),
            context={"time": tau.as_map(filt.space)},
        )
    return value


def scale_by(
    fam: RewardFamily, alpha: RandomVar, S: StoppingTime, filt: TwoSlotFiltration
) -> RewardFamily:
    """The family alpha * phi on {S <= t}, zero before S.

    Raises:
        NotMeasurableError: if alpha is not measurable before S
    """
    require_predictable(S, filt, "S")
    if not is_measurable(alpha, pre_sigma(S, filt)):
        raise NotMeasurableError(
            detail=(
                "scaling factor is not measurable before "
                f"S = {S.describe(filt.space)}"
            ),
            context={"alpha": alpha.as_strings(filt.space)},
        )
    if not alpha.is_nonnegative():
        raise ValidationError(detail="scaling factor must be nonnegative")
    scaled = RewardFamily(
        tuple((alpha * phi).on(S.where_le(t)) for t, phi in enumerate(fam.per_time))
    )
    report = validate_admissible(scaled, filt)
    if not report.ok:
        raise EngineInvariantError(
            detail=f"scaled reward lost admissibility: {report.first().message}",
            context=report.to_dict(),
        )
    return scaled
