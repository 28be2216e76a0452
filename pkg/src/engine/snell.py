"""
Predictable Value Function

V(S)  = max over predictable tau >= S of E[phi(tau) | before S]
V+(S) = the same maximum over the strict class tau > S

Backward induction on the grid:
    V(N) = V+(N) = phi_N
    V+(t) = E[V(t+1) | Q_t],  V(t) = max(phi_t, V+(t))

The brute-force oracle computes the defining maximum directly over the
complete enumeration of the predictable class; on a finite space without
null sets the essential supremum is the pointwise maximum.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from src.core.rationals import format_rational
from src.core.shared.exceptions import (
    EngineInvariantError,
    NotMeasurableError,
    ValidationError,
)
from src.engine.checks import CheckReport
from src.engine.filtered_space import (
    RandomVar,
    TwoSlotFiltration,
    condexp,
    is_measurable,
)
from src.engine.reward import RewardFamily, eval_at, validate_admissible
from src.engine.stopping_times import (
    DEFAULT_BUDGET,
    StoppingTime,
    enumerate_predictable,
    evaluate,
    glue,
    is_predictable,
    pre_sigma,
    require_predictable,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ValueSystem:
    """Value V(t) and strict value V+(t) per grid time, with their source."""

    v: Tuple[RandomVar, ...]
    v_plus: Tuple[RandomVar, ...]
    family: RewardFamily
    filtration: TwoSlotFiltration

    @property
    def horizon(self) -> int:
        return self.filtration.horizon

    def contact(self, t: int) -> frozenset[int]:
        """Outcomes where V(t) = phi_t."""
        pairs = zip(self.v[t].values, self.family[t].values)
        return frozenset(w for w, (a, b) in enumerate(pairs) if a == b)


def value_backward(fam: RewardFamily, filt: TwoSlotFiltration) -> ValueSystem:
    validate_admissible(fam, filt).raise_if_failed()
    space = filt.space
    horizon = filt.horizon
    v: List[Optional[RandomVar]] = [None] * (horizon + 1)
    v_plus: List[Optional[RandomVar]] = [None] * (horizon + 1)
    v[horizon] = fam[horizon]
    v_plus[horizon] = fam[horizon]
    for t in range(horizon - 1, -1, -1):
        v_plus[t] = condexp(v[t + 1], filt.pre[t], space)
        v[t] = fam[t].maximum(v_plus[t])
    logger.debug("backward induction over %d times", horizon + 1)
    return ValueSystem(tuple(v), tuple(v_plus), fam, filt)


def classical_value_backward(
    fam: RewardFamily, filt: TwoSlotFiltration
) -> Tuple[RandomVar, ...]:
    """Ordinary Snell envelope over the post-partitions and plain stopping times."""
    space = filt.space
    horizon = filt.horizon
    v: List[RandomVar] = [fam[horizon]]
    for t in range(horizon - 1, -1, -1):
        v.append(fam[t].maximum(condexp(v[-1], filt.post[t], space)))
    return tuple(reversed(v))


def conditional_reward(
    fam: RewardFamily, filt: TwoSlotFiltration, tau: StoppingTime, S: StoppingTime
) -> RandomVar:
    """E[phi(tau) | before S]."""
    return condexp(eval_at(fam, tau, filt), pre_sigma(S, filt), filt.space)


def value_bruteforce(
    fam: RewardFamily,
    filt: TwoSlotFiltration,
    S: StoppingTime,
    strict: bool = False,
    budget: int = DEFAULT_BUDGET,
) -> RandomVar:
    candidates = enumerate_predictable(filt, S, strict, budget)
    best: Optional[RandomVar] = None
    for tau in candidates:
        current = conditional_reward(fam, filt, tau, S)
        best = current if best is None else best.maximum(current)
    return best


def value_at(vs: ValueSystem, tau: StoppingTime) -> RandomVar:
    """V(tau)(w) = V(tau(w))(w)."""
    require_predictable(tau, vs.filtration)
    return evaluate(vs.v, tau)


def value_plus_at(vs: ValueSystem, tau: StoppingTime) -> RandomVar:
    """V+(tau)(w) = V+(tau(w))(w)."""
    require_predictable(tau, vs.filtration)
    return evaluate(vs.v_plus, tau)


class LocalizedValue:
    """tau -> alpha * V(tau) over the predictable times above S.

    With alpha the indicator of an event A this is the localized value V^A.
    """

    def __init__(self, vs: ValueSystem, alpha: RandomVar, S: StoppingTime):
        filt = vs.filtration
        require_predictable(S, filt, "S")
        if not is_measurable(alpha, pre_sigma(S, filt)):
            raise NotMeasurableError(
                detail=(
                    "localizing factor is not measurable before "
                    f"S = {S.describe(filt.space)}"
                ),
                context={"alpha": alpha.as_strings(filt.space)},
            )
        self.vs = vs
        self.alpha = alpha
        self.S = S

    def __call__(self, tau: StoppingTime) -> RandomVar:
        if not tau.dominates(self.S):
            raise ValidationError(
                detail="localized value is only defined for tau >= S",
                context={"time": tau.as_map(self.vs.filtration.space)},
            )
        return self.alpha * value_at(self.vs, tau)


def localized_value(
    vs: ValueSystem, event: Iterable[int], S: StoppingTime
) -> LocalizedValue:
    n = len(vs.filtration.space)
    return LocalizedValue(vs, RandomVar.indicator(n, event), S)


def scaled_value(vs: ValueSystem, alpha: RandomVar, S: StoppingTime) -> LocalizedValue:
    return LocalizedValue(vs, alpha, S)


def check_supermartingale_system(
    u: Sequence[RandomVar],
    filt: TwoSlotFiltration,
    martingale: bool = False,
    budget: int = DEFAULT_BUDGET,
    candidates: Optional[Sequence[StoppingTime]] = None,
) -> CheckReport:
    """E[u(tau') | before tau] <= u(tau) for every predictable tau <= tau'.

    With martingale=True the relation is equality. `candidates` restricts the
    quantified times; by default every predictable time is used. Reports the
    first violating (tau, tau', block).
    """
    name = "martingale_system" if martingale else "supermartingale_system"
    report = CheckReport(name)
    space = filt.space
    if len(u) != filt.horizon + 1:
        report.add("arity", f"expected {filt.horizon + 1} slots, got {len(u)}")
        return report
    for t, x in enumerate(u):
        if not is_measurable(x, filt.pre[t]):
            report.add(
                "not_measurable",
                f"u({t}) is not measurable for the pre-partition at t={t}",
                t=t,
            )
    if not report.ok:
        return report

    if candidates is None:
        origin = StoppingTime.constant(len(space), 0)
        candidates = enumerate_predictable(filt, origin, False, budget)
    relation = _equal if martingale else _at_most
    checked = 0
    for tau in candidates:
        here = evaluate(u, tau)
        before_tau = pre_sigma(tau, filt)
        for later in candidates:
            if not later.dominates(tau):
                continue
            checked += 1
            projected = condexp(evaluate(u, later), before_tau, space)
            w = projected.first_violation(here, relation)
            if w is None:
                continue
            report.add(
                "violation",
                f"E[u(tau') | before tau] = {format_rational(projected[w])} "
                f"{'!=' if martingale else '>'} u(tau) = {format_rational(here[w])}",
                tau=tau.as_map(space),
                tau_prime=later.as_map(space),
                block=space.ids(before_tau.block_of(w)),
                lhs=format_rational(projected[w]),
                rhs=format_rational(here[w]),
            )
            return report
    report.details["pairs"] = checked
    return report


@dataclass(frozen=True)
class OptimizingSequence:
    times: Tuple[StoppingTime, ...]
    values: Tuple[RandomVar, ...]

    @property
    def terminal(self) -> RandomVar:
        return self.values[-1]


def optimizing_sequence(
    fam: RewardFamily,
    filt: TwoSlotFiltration,
    S: StoppingTime,
    strict: bool = False,
    budget: int = DEFAULT_BUDGET,
) -> OptimizingSequence:
    """Walk the enumeration, gluing each candidate in where it does better.

    With A = {E[phi(cand) | before S] <= E[phi(best) | before S]} the next
    element is best on A and cand off A; conditional values are pointwise
    nondecreasing and the last element attains the value at S. Ties keep the
    earlier time (enumeration order).
    """
    candidates = enumerate_predictable(filt, S, strict, budget)
    before_s = pre_sigma(S, filt)
    space = filt.space
    best = candidates[0]
    best_value = conditional_reward(fam, filt, best, S)
    times = [best]
    values = [best_value]
    for cand in candidates[1:]:
        cand_value = conditional_reward(fam, filt, cand, S)
        keep = frozenset(w for w in range(len(space)) if cand_value[w] <= best_value[w])
        glued = glue(best, cand, keep)
        if glued == best:
            continue
        if not is_predictable(glued, filt):
            raise EngineInvariantError(
                detail="gluing on an event known before S gave a non-predictable time",
                context={"time": glued.as_map(space)},
            )
        glued_value = condexp(eval_at(fam, glued, filt), before_s, space)
        if glued_value != best_value.maximum(cand_value):
            raise EngineInvariantError(
                detail="glued time does not attain the pointwise maximum",
                context={"time": glued.as_map(space)},
            )
        best, best_value = glued, glued_value
        times.append(best)
        values.append(best_value)
    return OptimizingSequence(tuple(times), tuple(values))


def expected_reward(
    fam: RewardFamily, filt: TwoSlotFiltration, tau: StoppingTime
) -> Fraction:
    """E[phi(tau)]."""
    return filt.space.expectation(eval_at(fam, tau, filt))


def _equal(a: Fraction, b: Fraction) -> bool:
    return a == b


def _at_most(a: Fraction, b: Fraction) -> bool:
    return a <= b
