"""
Optimal Predictable Stopping

- tau_alpha(S): first t >= S with alpha * V(t) <= phi_t, for 0 < alpha < 1
- tau_hat(S): first contact t >= S with V(t) = phi_t; the stationary limit of
  tau_alpha as alpha increases to 1
- optimality criterion: tau* is optimal iff V(tau*) = phi(tau*) and V is a
  martingale system on [S, tau*]
- the set of times on whose interval V is a martingale system, closed under
  pointwise maximum, and its maximum tau_tilde
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Dict, Iterable, List, Sequence, Tuple

from src.core.rationals import format_rational
from src.core.shared.exceptions import (
    BadRequestError,
    EngineInvariantError,
    ValidationError,
)
from src.engine.checks import CheckReport
from src.engine.decomposition import MertensDecomposition, flat_before
from src.engine.filtered_space import RandomVar, condexp
from src.engine.reward import eval_at
from src.engine.snell import ValueSystem, expected_reward, value_at
from src.engine.stopping_times import (
    DEFAULT_BUDGET,
    StoppingTime,
    enumerate_predictable,
    is_predictable,
    lattice,
    pointwise_max,
    pointwise_min,
    pre_sigma,
    require_predictable,
)

logger = logging.getLogger(__name__)

ALPHA_LEVELS: Tuple[Fraction, ...] = (
    Fraction(1, 4),
    Fraction(1, 2),
    Fraction(3, 4),
    Fraction(9, 10),
)


def _check_alpha(alpha: Fraction) -> Fraction:
    alpha = Fraction(alpha)
    if not 0 < alpha < 1:
        raise BadRequestError(
            detail=(
                "alpha must lie strictly between 0 and 1, "
                f"got {format_rational(alpha)}"
            ),
            context={"alpha": str(alpha)},
        )
    return alpha


def _require_above(tau: StoppingTime, S: StoppingTime, vs: ValueSystem) -> None:
    if not tau.dominates(S):
        space = vs.filtration.space
        raise ValidationError(
            detail="stopping time must satisfy tau >= S pointwise",
            context={"tau": tau.as_map(space), "S": S.as_map(space)},
        )


def _first_time(
    vs: ValueSystem, S: StoppingTime, stops: Callable[[int, int], bool]
) -> StoppingTime:
    times = []
    for w, start in enumerate(S.time):
        t = start
        while t < vs.horizon and not stops(t, w):
            t += 1
        times.append(t)
    return StoppingTime(tuple(times))


def tau_alpha(vs: ValueSystem, S: StoppingTime, alpha: Fraction) -> StoppingTime:
    """First t >= S with alpha * V(t) <= phi_t.

    Raises:
        BadRequestError: if alpha is outside (0, 1)
    """
    alpha = _check_alpha(alpha)
    filt = vs.filtration
    require_predictable(S, filt, "S")
    phi = vs.family
    tau = _first_time(vs, S, lambda t, w: alpha * vs.v[t][w] <= phi[t][w])
    if not is_predictable(tau, filt):
        raise EngineInvariantError(
            detail="penalized time is not predictable",
            context={"time": tau.as_map(filt.space), "alpha": format_rational(alpha)},
        )
    if not (alpha * value_at(vs, tau)).leq(eval_at(phi, tau, filt)):
        raise EngineInvariantError(
            detail="penalized time does not cover the alpha-fraction of the value",
            context={"time": tau.as_map(filt.space), "alpha": format_rational(alpha)},
        )
    return tau


def stationarity_threshold(vs: ValueSystem, S: StoppingTime) -> Fraction:
    """The exact alpha* < 1 with tau_alpha(S) = tau_hat(S) for alpha in (alpha*, 1).

    It is the largest ratio phi_t / V(t) strictly before first contact (0 when
    S is already a contact time everywhere).
    """
    phi = vs.family
    hat = _first_contact(vs, S)
    ratios = [
        phi[t][w] / vs.v[t][w]
        for w in range(len(S))
        for t in range(S[w], hat[w])
    ]
    return max(ratios, default=Fraction(0))


def _first_contact(vs: ValueSystem, S: StoppingTime) -> StoppingTime:
    phi = vs.family
    return _first_time(vs, S, lambda t, w: vs.v[t][w] == phi[t][w])


def tau_hat(vs: ValueSystem, S: StoppingTime) -> StoppingTime:
    """First contact time, cross-checked against tau_alpha at alpha = 1 - 1/k."""
    filt = vs.filtration
    require_predictable(S, filt, "S")
    hat = _first_contact(vs, S)
    threshold = stationarity_threshold(vs, S)
    k = max(2, int(1 / (1 - threshold)) + 1)
    for alpha in (1 - Fraction(1, k), 1 - Fraction(1, k + 1)):
        if tau_alpha(vs, S, alpha) != hat:
            raise EngineInvariantError(
                detail="penalized times are not stationary at the first contact time",
                context={
                    "alpha": format_rational(alpha),
                    "time": hat.as_map(filt.space),
                },
            )
    return hat


def martingale_interval(vs: ValueSystem, S: StoppingTime, tau: StoppingTime) -> bool:
    """V(t) = E[V(t+1) | Q_t] on every pre-block inside {S <= t < tau}."""
    _require_above(tau, S, vs)
    for t in range(vs.horizon):
        inside = S.where_le(t) & tau.where_gt(t)
        if not vs.v[t].equals(vs.v_plus[t], on=inside):
            return False
    return True


def martingale_interval_pairwise(
    vs: ValueSystem,
    S: StoppingTime,
    tau: StoppingTime,
    budget: int = DEFAULT_BUDGET,
) -> bool:
    """E[V(tau2) | before tau1] = V(tau1) for predictable S <= tau1 <= tau2 <= tau."""
    _require_above(tau, S, vs)
    filt = vs.filtration
    above = enumerate_predictable(filt, S, False, budget)
    inside = [t for t in above if tau.dominates(t)]
    for first in inside:
        here = value_at(vs, first)
        before = pre_sigma(first, filt)
        for second in inside:
            if not second.dominates(first):
                continue
            if condexp(value_at(vs, second), before, filt.space) != here:
                return False
    return True


@dataclass(frozen=True)
class CriterionResult:
    optimal: bool
    cond1: bool
    cond2: bool
    expected: Fraction
    best: Fraction

    def to_dict(self) -> Dict[str, object]:
        return {
            "optimal": self.optimal,
            "cond1": self.cond1,
            "cond2": self.cond2,
            "expected": format_rational(self.expected),
            "best": format_rational(self.best),
        }


def best_expected_reward(
    vs: ValueSystem, S: StoppingTime, budget: int = DEFAULT_BUDGET
) -> Fraction:
    """max over predictable tau >= S of E[phi(tau)]."""
    filt = vs.filtration
    return max(
        expected_reward(vs.family, filt, tau)
        for tau in enumerate_predictable(filt, S, False, budget)
    )


def criterion_check(
    vs: ValueSystem,
    S: StoppingTime,
    tau_star: StoppingTime,
    budget: int = DEFAULT_BUDGET,
) -> CriterionResult:
    """Direct optimality against the two-condition criterion.

    Raises:
        EngineInvariantError: if the direct test and the criterion disagree
    """
    filt = vs.filtration
    require_predictable(S, filt, "S")
    require_predictable(tau_star, filt, "tau*")
    _require_above(tau_star, S, vs)
    cond1 = value_at(vs, tau_star) == eval_at(vs.family, tau_star, filt)
    cond2 = martingale_interval(vs, S, tau_star)
    expected = expected_reward(vs.family, filt, tau_star)
    best = best_expected_reward(vs, S, budget)
    result = CriterionResult(expected == best, cond1, cond2, expected, best)
    if result.optimal != (cond1 and cond2):
        raise EngineInvariantError(
            detail="optimality criterion disagrees with the direct test",
            context={"time": tau_star.as_map(filt.space), **result.to_dict()},
        )
    return result


@dataclass(frozen=True)
class OptimalSet:
    members: Tuple[StoppingTime, ...]
    tau_tilde: StoppingTime


def optimal_set(
    vs: ValueSystem, S: StoppingTime, budget: int = DEFAULT_BUDGET
) -> OptimalSet:
    """Predictable tau >= S with V a martingale system on [S, tau], and the maximum."""
    filt = vs.filtration
    members = tuple(
        tau for tau in enumerate_predictable(filt, S, False, budget)
        if martingale_interval(vs, S, tau)
    )
    present = set(members)
    for first, second in combinations(members, 2):
        upper = lattice(first, second)[1]
        if upper not in present:
            raise EngineInvariantError(
                detail="martingale-interval set is not closed under pointwise maximum",
                context={"time": upper.as_map(filt.space)},
            )
    tilde = pointwise_max(members)
    if tilde not in present or not martingale_interval(vs, S, tilde):
        raise EngineInvariantError(
            detail="V is not a martingale system up to the maximal time",
            context={"time": tilde.as_map(filt.space)},
        )
    return OptimalSet(members, tilde)


def penalized_set(
    vs: ValueSystem, S: StoppingTime, alpha: Fraction, budget: int = DEFAULT_BUDGET
) -> Tuple[StoppingTime, ...]:
    """Predictable tau >= S with alpha * V(tau) <= phi(tau)."""
    alpha = _check_alpha(alpha)
    filt = vs.filtration
    return tuple(
        tau for tau in enumerate_predictable(filt, S, False, budget)
        if (alpha * value_at(vs, tau)).leq(eval_at(vs.family, tau, filt))
    )


def representation_check(
    vs: ValueSystem, S: StoppingTime, budget: int = DEFAULT_BUDGET
) -> CheckReport:
    """V(S) = E[phi(tau_hat) | before S] and E[phi(tau_hat)] = max E[phi(tau)].

    The left and right contact events are empty on the grid; their masses are
    reported and checked to be zero.
    """
    filt = vs.filtration
    space = filt.space
    report = CheckReport("first_contact_representation")
    hat = tau_hat(vs, S)
    lhs = value_at(vs, S)
    rhs = condexp(eval_at(vs.family, hat, filt), pre_sigma(S, filt), space)
    w = lhs.first_violation(rhs, lambda a, b: a == b)
    if w is not None:
        report.add(
            "representation",
            f"V(S) = {format_rational(lhs[w])} but "
            f"E[phi(tau_hat) | before S] = {format_rational(rhs[w])}",
            outcome=space.outcomes[w],
            lhs=format_rational(lhs[w]),
            rhs=format_rational(rhs[w]),
        )
    expected = expected_reward(vs.family, filt, hat)
    best = best_expected_reward(vs, S, budget)
    if expected != best:
        report.add(
            "not_attained",
            f"E[phi(tau_hat)] = {format_rational(expected)} "
            f"below the best {format_rational(best)}",
            lhs=format_rational(expected),
            rhs=format_rational(best),
        )
    contact = _agree(value_at(vs, hat), eval_at(vs.family, hat, filt))
    right_miss = space.mass(space.omega - contact)
    if right_miss != 0:
        report.add(
            "right_contact",
            f"right contact event has mass {format_rational(right_miss)}",
        )
    report.details.update(
        {
            "h_minus_mass": "0",
            "h_mass": format_rational(1 - right_miss),
            "h_plus_mass": format_rational(right_miss),
        }
    )
    return report


def _agree(x: RandomVar, y: RandomVar) -> frozenset[int]:
    return frozenset(w for w, (a, b) in enumerate(zip(x.values, y.values)) if a == b)


@dataclass(frozen=True)
class OptimalReport:
    s: StoppingTime
    tau_alpha: Dict[Fraction, StoppingTime]
    tau_hat: StoppingTime
    alpha_star: Fraction
    optimal_set: Tuple[StoppingTime, ...]
    tau_tilde: StoppingTime
    value_at_s: RandomVar
    optimal_value: Fraction
    attained_by: Tuple[StoppingTime, ...]
    criterion: CriterionResult
    representation: CheckReport = field(compare=False)


def optimal_report(
    vs: ValueSystem,
    S: StoppingTime,
    alphas: Iterable[Fraction] = ALPHA_LEVELS,
    budget: int = DEFAULT_BUDGET,
) -> OptimalReport:
    filt = vs.filtration
    hat = tau_hat(vs, S)
    taus = {Fraction(a): tau_alpha(vs, S, a) for a in alphas}
    for alpha, tau in taus.items():
        members = penalized_set(vs, S, alpha, budget)
        if pointwise_min(members) != tau:
            raise EngineInvariantError(
                detail="penalized time differs from the minimum of the penalized set",
                context={
                    "alpha": format_rational(alpha),
                    "time": tau.as_map(filt.space),
                },
            )
    best = best_expected_reward(vs, S, budget)
    attained = tuple(
        tau for tau in enumerate_predictable(filt, S, False, budget)
        if expected_reward(vs.family, filt, tau) == best
    )
    if hat not in attained:
        raise EngineInvariantError(
            detail="first contact time is not optimal",
            context={"time": hat.as_map(filt.space)},
        )
    chosen = optimal_set(vs, S, budget)
    return OptimalReport(
        s=S,
        tau_alpha=taus,
        tau_hat=hat,
        alpha_star=stationarity_threshold(vs, S),
        optimal_set=chosen.members,
        tau_tilde=chosen.tau_tilde,
        value_at_s=value_at(vs, S),
        optimal_value=best,
        attained_by=attained,
        criterion=criterion_check(vs, S, hat, budget),
        representation=representation_check(vs, S, budget),
    )


def flat_before_penalized(
    d: MertensDecomposition, S: StoppingTime, alphas: Sequence[Fraction] = ALPHA_LEVELS
) -> List[CheckReport]:
    """flat_before for tau_alpha(S) at each alpha and for tau_hat(S)."""
    vs = d.values
    reports = [flat_before(d, tau_alpha(vs, S, a), S) for a in alphas]
    reports.append(flat_before(d, tau_hat(vs, S), S))
    return reports
