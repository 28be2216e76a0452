"""
Property Registry

One descriptor per checked statement about the predictable value system. A
check receives a SuiteContext and returns None when the statement holds on
every quantified input, or the first Witness it finds.

Statements about left limits and path regularity have no counterpart on a
finite grid; they are registered with modeled=False and reported as
not-modeled.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Callable, Dict, List, Optional, Tuple

from src.core.rationals import format_rational
from src.engine.checks import CheckReport
from src.engine.decomposition import (
    check_identities,
    decompose,
    flat_off_contact_check,
)
from src.engine.filtered_space import Partition, RandomVar, condexp
from src.engine.optimal_stop import (
    ALPHA_LEVELS,
    criterion_check,
    flat_before_penalized,
    martingale_interval,
    martingale_interval_pairwise,
    optimal_set,
    penalized_set,
    representation_check,
    stationarity_threshold,
    tau_alpha,
    tau_hat,
)
from src.engine.reward import RewardFamily, eval_at, scale_by
from src.engine.snell import (
    check_supermartingale_system,
    classical_value_backward,
    conditional_reward,
    localized_value,
    optimizing_sequence,
    value_at,
    value_backward,
    value_bruteforce,
    value_plus_at,
)
from src.engine.stopping_times import (
    StoppingTime,
    glue,
    in_class,
    is_predictable,
    lattice,
    pointwise_min,
    pre_sigma,
    successor,
)
from src.services.propcheck.context import GE, LE, SuiteContext, Witness

Check = Callable[[SuiteContext], Optional[Witness]]

_STRICT = {False: "", True: " (strict)"}


@dataclass(frozen=True)
class PropertyDescriptor:
    id: str
    statement: str
    quantifiers: str
    check: Optional[Check] = None

    @property
    def modeled(self) -> bool:
        return self.check is not None


def _from_report(report: CheckReport, **where) -> Witness:
    finding = report.first()
    return Witness(
        note=f"{finding.code}: {finding.message}",
        extra=dict(finding.context),
        **where,
    )


def _varying_block(x: RandomVar, partition: Partition) -> Optional[frozenset]:
    for block in partition.blocks:
        if len({x[w] for w in block}) > 1:
            return block
    return None


def _where(x: RandomVar, predicate: Callable[[int], bool]) -> frozenset:
    return frozenset(w for w in range(len(x)) if predicate(w))


# -- value and oracle --------------------------------------------------------


def _oracle_equivalence(c: SuiteContext) -> Optional[Witness]:
    for S in c.constants:
        t = S[0]
        for strict, mine in ((False, c.vs.v[t]), (True, c.vs.v_plus[t])):
            found = c.expect(
                mine,
                c.oracle(S, strict),
                partition=c.filt.pre[t],
                S=S,
                t=t,
                note="backward induction differs from brute force" + _STRICT[strict],
            )
            if found:
                return found
    return None


def _aggregation(c: SuiteContext) -> Optional[Witness]:
    for S in c.all_predictable:
        before_s = pre_sigma(S, c.filt)
        values = ((False, value_at(c.vs, S)), (True, value_plus_at(c.vs, S)))
        for strict, mine in values:
            found = c.expect(
                mine,
                c.oracle(S, strict),
                partition=before_s,
                S=S,
                note="aggregated value differs from brute force" + _STRICT[strict],
            )
            if found:
                return found
    return None


def _lattice_max_closure(c: SuiteContext) -> Optional[Witness]:
    n = len(c.space)
    for S in c.starts():
        before_s = pre_sigma(S, c.filt)
        for first, second in c.pairs(c.above(S)):
            c.tick(2)
            e1 = conditional_reward(c.family, c.filt, first, S)
            e2 = conditional_reward(c.family, c.filt, second, S)
            keep = frozenset(w for w in range(n) if e2[w] <= e1[w])
            glued = glue(first, second, keep)
            if not is_predictable(glued, c.filt) or not in_class(
                glued, S, c.horizon, False
            ):
                return Witness(
                    S=S,
                    tau=first,
                    theta=second,
                    event=keep,
                    note="glued time leaves the class above S",
                )
            for bound in lattice(first, second):
                if not is_predictable(bound, c.filt):
                    return Witness(
                        S=S,
                        tau=first,
                        theta=second,
                        note="pointwise min or max is not predictable",
                    )
            found = c.expect(
                conditional_reward(c.family, c.filt, glued, S),
                e1.maximum(e2),
                partition=before_s,
                S=S,
                tau=first,
                theta=second,
                event=keep,
                note="glued time does not attain the pointwise maximum",
            )
            if found:
                return found
    return None


def _optimizing_sequence(c: SuiteContext) -> Optional[Witness]:
    for S in c.starts():
        before_s = pre_sigma(S, c.filt)
        for strict in (False, True):
            c.tick(len(c.above(S, strict)))
            seq = optimizing_sequence(c.family, c.filt, S, strict, c.budget)
            steps = zip(seq.values, seq.values[1:], seq.times[1:])
            for previous, current, time in steps:
                found = c.expect(
                    previous,
                    current,
                    LE,
                    partition=before_s,
                    S=S,
                    tau=time,
                    note="conditional rewards decrease along the sequence",
                )
                if found:
                    return found
            found = c.expect(
                seq.terminal,
                c.oracle(S, strict),
                partition=before_s,
                S=S,
                tau=seq.times[-1],
                note="sequence does not reach the value" + _STRICT[strict],
            )
            if found:
                return found
    return None


def _bellman_scaled(c: SuiteContext) -> Optional[Witness]:
    for S in c.starts():
        before_s = pre_sigma(S, c.filt)
        alphas = list(c.sample(c.alpha_factors(S)))
        for theta in c.sample(c.above(S)):
            for strict in (False, True):
                inner = c.above(theta, strict)
                if strict:
                    at_theta = value_plus_at(c.vs, theta)
                else:
                    at_theta = value_at(c.vs, theta)
                rewards = [eval_at(c.family, tau, c.filt) for tau in inner]
                for label, alpha in alphas:
                    c.tick(len(inner))
                    lhs = condexp(alpha * at_theta, before_s, c.space)
                    rhs = reduce(
                        RandomVar.maximum,
                        (condexp(alpha * r, before_s, c.space) for r in rewards),
                    )
                    found = c.expect(
                        lhs,
                        rhs,
                        partition=before_s,
                        S=S,
                        theta=theta,
                        alpha=label,
                        note="E[alpha V(theta) | before S] differs from the best "
                        "alpha-reward" + _STRICT[strict],
                    )
                    if found:
                        return found
    return None


def _value_scaling(c: SuiteContext) -> Optional[Witness]:
    for S in c.starts():
        for label, alpha in c.sample(c.alpha_factors(S)):
            scaled = scale_by(c.family, alpha, S, c.filt)
            for tau in c.sample(c.above(S)):
                before_tau = pre_sigma(tau, c.filt)
                own_values = (
                    (False, value_at(c.vs, tau)),
                    (True, value_plus_at(c.vs, tau)),
                )
                for strict, own in own_values:
                    c.tick(len(c.above(tau, strict)))
                    found = c.expect(
                        value_bruteforce(scaled, c.filt, tau, strict, c.budget),
                        alpha * own,
                        partition=before_tau,
                        S=S,
                        tau=tau,
                        alpha=label,
                        note="value of the scaled reward differs from alpha times "
                        "the value" + _STRICT[strict],
                    )
                    if found:
                        return found
    return None


def _localized_agreement(c: SuiteContext) -> Optional[Witness]:
    n = len(c.space)
    for first, second in c.pairs(c.all_predictable):
        agree = frozenset(w for w in range(n) if first[w] == second[w])
        if not agree:
            continue
        lower = lattice(first, second)[0]
        indicator = RandomVar.indicator(n, agree)
        localized = scale_by(c.family, indicator, lower, c.filt)
        for strict in (False, True):
            c.tick(len(c.above(first, strict)) + len(c.above(second, strict)))
            found = c.expect(
                value_bruteforce(localized, c.filt, first, strict, c.budget),
                value_bruteforce(localized, c.filt, second, strict, c.budget),
                tau=first,
                theta=second,
                event=agree,
                note="localized values differ where the times agree"
                + _STRICT[strict],
            )
            if found:
                return found
    return None


def _strict_value_dominates(c: SuiteContext) -> Optional[Witness]:
    n = len(c.space)
    for first, second in c.pairs(c.all_predictable):
        for tau, theta in ((first, second), (second, first)):
            later = frozenset(w for w in range(n) if tau[w] > theta[w])
            if not later:
                continue
            before_theta = pre_sigma(theta, c.filt)
            if not before_theta.measures(later):
                return Witness(
                    tau=tau,
                    theta=theta,
                    event=later,
                    note="{tau > theta} is not known before theta",
                )
            lhs = condexp(eval_at(c.family, tau, c.filt), before_theta, c.space)
            found = c.expect(
                lhs,
                value_plus_at(c.vs, theta),
                LE,
                on=later,
                partition=before_theta,
                tau=tau,
                theta=theta,
                event=later,
                note="E[phi(tau) | before theta] exceeds V+(theta) on {tau > theta}",
            )
            if found:
                return found
            indicator = RandomVar.indicator(n, later)
            localized = scale_by(c.family, indicator, theta, c.filt)
            c.tick(len(c.above(theta, True)))
            found = c.expect(
                indicator * lhs,
                value_bruteforce(localized, c.filt, theta, True, c.budget),
                LE,
                partition=before_theta,
                tau=tau,
                theta=theta,
                event=later,
                note="localized reward exceeds the localized strict value",
            )
            if found:
                return found
    return None


def _localization(c: SuiteContext) -> Optional[Witness]:
    n = len(c.space)
    for S in c.starts():
        for event in c.sample(c.events(S)):
            indicator = RandomVar.indicator(n, event)
            localized = scale_by(c.family, indicator, S, c.filt)
            local = localized_value(c.vs, event, S)
            for tau in c.sample(c.above(S)):
                before_tau = pre_sigma(tau, c.filt)
                expected = (
                    (False, local(tau)),
                    (True, indicator * value_plus_at(c.vs, tau)),
                )
                for strict, own in expected:
                    c.tick(len(c.above(tau, strict)))
                    found = c.expect(
                        value_bruteforce(localized, c.filt, tau, strict, c.budget),
                        own,
                        partition=before_tau,
                        S=S,
                        tau=tau,
                        event=event,
                        note="value of the localized reward differs from 1_A V"
                        + _STRICT[strict],
                    )
                    if found:
                        return found
    return None


def _localization_additivity(c: SuiteContext) -> Optional[Witness]:
    n = len(c.space)
    for S in c.starts():
        for event in c.sample(c.events(S)):
            complement = c.space.omega - event
            inside = scale_by(c.family, RandomVar.indicator(n, event), S, c.filt)
            outside = scale_by(
                c.family, RandomVar.indicator(n, complement), S, c.filt
            )
            for tau in c.sample(c.above(S)):
                c.tick(2 * len(c.above(tau)))
                total = value_bruteforce(
                    inside, c.filt, tau, False, c.budget
                ) + value_bruteforce(outside, c.filt, tau, False, c.budget)
                found = c.expect(
                    total,
                    value_at(c.vs, tau),
                    partition=pre_sigma(tau, c.filt),
                    S=S,
                    tau=tau,
                    event=event,
                    note="V^A + V^(A^c) differs from V",
                )
                if found:
                    return found
    return None


def _value_admissibility(c: SuiteContext) -> Optional[Witness]:
    n = len(c.space)
    times = c.sample_times()
    for tau in times:
        before_tau = pre_sigma(tau, c.filt)
        values = (("V", value_at(c.vs, tau)), ("V+", value_plus_at(c.vs, tau)))
        for name, x in values:
            c.tick()
            if not x.is_nonnegative():
                return Witness(tau=tau, note=f"{name}(tau) is negative")
            block = _varying_block(x, before_tau)
            if block is not None:
                return Witness(
                    tau=tau,
                    block=block,
                    note=f"{name}(tau) is not measurable before tau",
                )
    for first, second in c.pairs(times):
        agree = frozenset(w for w in range(n) if first[w] == second[w])
        for name, read in (("V", value_at), ("V+", value_plus_at)):
            found = c.expect(
                read(c.vs, first),
                read(c.vs, second),
                on=agree,
                tau=first,
                theta=second,
                event=agree,
                note=f"{name} differs where the times agree",
            )
            if found:
                return found
    return None


def _localized_martingale_system(c: SuiteContext) -> Optional[Witness]:
    n = len(c.space)
    for S in c.starts():
        c.tick(len(c.above(S)))
        tilde = optimal_set(c.vs, S, c.budget).tau_tilde
        interval = [tau for tau in c.above(S) if tilde.dominates(tau)]
        for event in c.sample(c.events(S)):
            indicator = RandomVar.indicator(n, event)
            for first, second in c.pairs(interval, ordered=True):
                before_first = pre_sigma(first, c.filt)
                later = indicator * value_at(c.vs, second)
                found = c.expect(
                    condexp(later, before_first, c.space),
                    indicator * value_at(c.vs, first),
                    partition=before_first,
                    S=S,
                    tau=first,
                    theta=second,
                    event=event,
                    note="1_A V is not a martingale system up to the maximal "
                    "optimal time",
                )
                if found:
                    return found
    return None


def _snell_supermartingale(c: SuiteContext) -> Optional[Witness]:
    for t in c.filt.times:
        found = c.expect(
            c.vs.v[t],
            c.family[t],
            GE,
            partition=c.filt.pre[t],
            t=t,
            note="V lies below phi",
        )
        if found:
            return found
    times = c.sample_times()
    c.tick(len(times) ** 2)
    report = check_supermartingale_system(c.vs.v, c.filt, False, c.budget, times)
    return None if report.ok else _from_report(report)


def _random_measurable(c: SuiteContext, t: int, high: int) -> RandomVar:
    values = [Fraction(0)] * len(c.space)
    for block in c.filt.pre[t].blocks:
        x = Fraction(int(c.rng.integers(0, high + 1)), int(c.rng.integers(1, 3)))
        for w in block:
            values[w] = x
    return RandomVar.of(values)


def _candidate_systems(c: SuiteContext) -> List[Tuple[str, List[RandomVar]]]:
    """Competing systems above phi.

    V plus a supermartingale, V lowered on one block, and noisy rewards.
    """
    n = len(c.space)
    horizon = c.horizon
    systems: List[Tuple[str, List[RandomVar]]] = []

    bump: List[RandomVar] = [RandomVar.constant(n, 0)] * (horizon + 1)
    bump[horizon] = _random_measurable(c, horizon, 3)
    for t in range(horizon - 1, -1, -1):
        carried = condexp(bump[t + 1], c.filt.pre[t], c.space)
        bump[t] = carried + _random_measurable(c, t, 2)
    systems.append(("raised", [v + d for v, d in zip(c.vs.v, bump)]))

    for _ in range(3):
        t = int(c.rng.integers(0, horizon + 1))
        blocks = c.filt.pre[t].blocks
        block = blocks[int(c.rng.integers(0, len(blocks)))]
        dent = RandomVar.indicator(n, block) * Fraction(int(c.rng.integers(1, 4)), 2)
        lowered = list(c.vs.v)
        lowered[t] = c.family[t].maximum(c.vs.v[t] - dent)
        systems.append((f"lowered at t={t}", lowered))

    noisy = [c.family[t] + _random_measurable(c, t, 2) for t in c.filt.times]
    systems.append(("noisy reward", noisy))
    return systems


def _snell_minimality(c: SuiteContext) -> Optional[Witness]:
    others = [S for S in c.all_predictable if not S.is_constant()]
    candidates = [*c.constants, *c.sample(others)]
    for label, u in _candidate_systems(c):
        if not all(c.family[t].leq(u[t]) for t in c.filt.times):
            continue
        c.tick(len(candidates) ** 2)
        system = check_supermartingale_system(u, c.filt, False, c.budget, candidates)
        if not system.ok:
            continue
        for t in c.filt.times:
            found = c.expect(
                c.vs.v[t],
                u[t],
                LE,
                partition=c.filt.pre[t],
                t=t,
                note=f"{label} supermartingale system above phi lies below V",
            )
            if found:
                return found
    return None


def _value_reward_strict_max(c: SuiteContext) -> Optional[Witness]:
    for S in c.starts():
        found = c.expect(
            value_at(c.vs, S),
            eval_at(c.family, S, c.filt).maximum(value_plus_at(c.vs, S)),
            partition=pre_sigma(S, c.filt),
            S=S,
            note="V(S) differs from max(phi(S), V+(S))",
        )
        if found:
            return found
    return None


def _strict_value_bound(c: SuiteContext) -> Optional[Witness]:
    for S in c.starts():
        before_s = pre_sigma(S, c.filt)
        bound = value_plus_at(c.vs, S)
        for tau in c.sample(c.above(S, True)):
            found = c.expect(
                condexp(value_at(c.vs, tau), before_s, c.space),
                bound,
                LE,
                partition=before_s,
                S=S,
                tau=tau,
                note="E[V(tau) | before S] exceeds V+(S) for tau after S",
            )
            if found:
                return found
    return None


def _right_limit(c: SuiteContext, S: StoppingTime) -> RandomVar:
    """E[V(S+) | before S] with S+ = (S + 1) capped at the horizon."""
    after = value_at(c.vs, successor(S, c.horizon))
    return condexp(after, pre_sigma(S, c.filt), c.space)


def _right_limit_bounds(c: SuiteContext) -> Optional[Witness]:
    for S in c.starts():
        before_s = pre_sigma(S, c.filt)
        right = _right_limit(c, S)
        for tau in c.sample(c.above(S, True)):
            found = c.expect(
                condexp(value_at(c.vs, tau), before_s, c.space),
                right,
                LE,
                partition=before_s,
                S=S,
                tau=tau,
                note="E[V(tau) | before S] exceeds E[V(S+) | before S]",
            )
            if found:
                return found
        found = c.expect(
            value_plus_at(c.vs, S),
            right,
            partition=before_s,
            S=S,
            note="V+(S) differs from E[V(S+) | before S]",
        )
        if found:
            return found
    return None


def _right_limit_below_value(c: SuiteContext) -> Optional[Witness]:
    for S in c.starts():
        found = c.expect(
            _right_limit(c, S),
            value_at(c.vs, S),
            LE,
            partition=pre_sigma(S, c.filt),
            S=S,
            note="E[V(S+) | before S] exceeds V(S)",
        )
        if found:
            return found
    return None


def _value_recursion(c: SuiteContext) -> Optional[Witness]:
    for S in c.starts():
        before_s = pre_sigma(S, c.filt)
        right = _right_limit(c, S)
        reward = eval_at(c.family, S, c.filt)
        projected = condexp(reward, before_s, c.space)
        forms = (
            ("max(phi(S), E[V(S+) | before S])", reward.maximum(right)),
            (
                "max(E[phi(S) | before S], E[V(S+) | before S])",
                projected.maximum(right),
            ),
        )
        for name, rhs in forms:
            found = c.expect(
                value_at(c.vs, S),
                rhs,
                partition=before_s,
                S=S,
                note=f"V(S) differs from {name}",
            )
            if found:
                return found
    return None


def _gap_supported_on_contact(c: SuiteContext) -> Optional[Witness]:
    n = len(c.space)
    for S in c.starts():
        value = value_at(c.vs, S)
        reward = eval_at(c.family, S, c.filt)
        off_contact = _where(
            value, lambda w: S[w] < c.horizon and value[w] > reward[w]
        )
        found = c.expect(
            value - _right_limit(c, S),
            RandomVar.constant(n, 0),
            on=off_contact,
            partition=pre_sigma(S, c.filt),
            S=S,
            note="V(S) jumps above its right limit where V > phi",
        )
        if found:
            return found
    return None


def _strict_value_supermartingale(c: SuiteContext) -> Optional[Witness]:
    times = c.sample_times()
    c.tick(len(times) ** 2)
    report = check_supermartingale_system(
        c.vs.v_plus, c.filt, False, c.budget, times
    )
    return None if report.ok else _from_report(report)


# -- optimal stopping ---------------------------------------------------------


def _optimality_criterion(c: SuiteContext) -> Optional[Witness]:
    for S in c.starts():
        hat = tau_hat(c.vs, S)
        for tau in [hat, *c.sample(c.above(S))]:
            c.tick(len(c.above(S)))
            result = criterion_check(c.vs, S, tau, c.budget)
            if tau == hat and not result.optimal:
                return Witness(
                    S=S,
                    tau=tau,
                    note="first contact time is not optimal",
                    extra=result.to_dict(),
                )
    return None


def _optimal_set_closure(c: SuiteContext) -> Optional[Witness]:
    for S in c.starts():
        c.tick(len(c.above(S)))
        chosen = optimal_set(c.vs, S, c.budget)
        present = set(chosen.members)
        for tau in chosen.members:
            if not chosen.tau_tilde.dominates(tau):
                return Witness(
                    S=S,
                    tau=tau,
                    theta=chosen.tau_tilde,
                    note="member above the maximal time",
                )
        for first, second in c.pairs(chosen.members):
            if lattice(first, second)[1] not in present:
                return Witness(
                    S=S,
                    tau=first,
                    theta=second,
                    note="pointwise maximum left the set",
                )
        result = criterion_check(c.vs, S, chosen.tau_tilde, c.budget)
        if not result.optimal:
            return Witness(
                S=S,
                tau=chosen.tau_tilde,
                note="maximal time is not optimal",
                extra=result.to_dict(),
            )
    return None


def _martingale_interval_equivalence(c: SuiteContext) -> Optional[Witness]:
    for S in c.starts():
        above = c.above(S)
        for tau in c.sample(above):
            inside = sum(1 for x in above if tau.dominates(x))
            c.tick(inside * inside)
            local = martingale_interval(c.vs, S, tau)
            pairwise = martingale_interval_pairwise(c.vs, S, tau, c.budget)
            if local != pairwise:
                return Witness(
                    S=S,
                    tau=tau,
                    note="one-step and pairwise martingale tests disagree",
                    extra={"one_step": local, "pairwise": pairwise},
                )
    return None


def _penalization_cover(c: SuiteContext) -> Optional[Witness]:
    for S in c.starts():
        for alpha in ALPHA_LEVELS:
            label = format_rational(alpha)
            tau = tau_alpha(c.vs, S, alpha)
            found = c.expect(
                alpha * value_at(c.vs, tau),
                eval_at(c.family, tau, c.filt),
                LE,
                partition=pre_sigma(tau, c.filt),
                S=S,
                tau=tau,
                alpha=label,
                note="alpha V(tau_alpha) exceeds phi(tau_alpha)",
            )
            if found:
                return found
            c.tick(len(c.above(S)))
            members = penalized_set(c.vs, S, alpha, c.budget)
            if tau not in members or pointwise_min(members) != tau:
                return Witness(
                    S=S,
                    tau=tau,
                    alpha=label,
                    note="tau_alpha is not the minimum of the penalized set",
                )
            present = set(members)
            for first, second in c.pairs(members):
                if lattice(first, second)[0] not in present:
                    return Witness(
                        S=S,
                        tau=first,
                        theta=second,
                        alpha=label,
                        note="penalized set is not closed under pointwise minimum",
                    )
    return None


def _penalization_stationarity(c: SuiteContext) -> Optional[Witness]:
    for S in c.starts():
        hat = tau_hat(c.vs, S)
        previous = S
        for alpha in sorted(ALPHA_LEVELS):
            c.tick()
            tau = tau_alpha(c.vs, S, alpha)
            label = format_rational(alpha)
            if not tau.dominates(previous):
                return Witness(
                    S=S,
                    tau=tau,
                    theta=previous,
                    alpha=label,
                    note="tau_alpha decreases as alpha grows",
                )
            if not hat.dominates(tau):
                return Witness(
                    S=S,
                    tau=tau,
                    theta=hat,
                    alpha=label,
                    note="tau_alpha exceeds the first contact time",
                )
            previous = tau
        star = stationarity_threshold(c.vs, S)
        if not 0 <= star < 1:
            return Witness(
                S=S,
                alpha=format_rational(star),
                note="stationarity threshold outside [0, 1)",
            )
        middle = (1 + star) / 2
        if tau_alpha(c.vs, S, middle) != hat:
            return Witness(
                S=S,
                tau=hat,
                alpha=format_rational(middle),
                note="tau_alpha above the threshold is not tau_hat",
            )
        if star > 0 and tau_alpha(c.vs, S, star) == hat:
            return Witness(
                S=S,
                tau=hat,
                alpha=format_rational(star),
                note="stationarity threshold is not sharp",
            )
    return None


# -- decomposition ------------------------------------------------------------


def _mertens_decomposition(c: SuiteContext) -> Optional[Witness]:
    d = c.decomposition
    for report in (check_identities(d), flat_off_contact_check(d)):
        if not report.ok:
            return _from_report(report)
    if decompose(c.vs) != d:
        return Witness(note="decomposition is not reproducible")
    times = c.sample_times()
    c.tick(len(times) ** 2)
    report = check_supermartingale_system(d.m, c.filt, True, c.budget, times)
    return None if report.ok else _from_report(report)


def _flat_before_optimal(c: SuiteContext) -> Optional[Witness]:
    d = c.decomposition
    for S in c.starts():
        c.tick(len(ALPHA_LEVELS) + 1)
        for report in flat_before_penalized(d, S):
            if not report.ok:
                return _from_report(report, S=S)
        before_s = pre_sigma(S, c.filt)
        for alpha in ALPHA_LEVELS:
            tau = tau_alpha(c.vs, S, alpha)
            stopped = d.m_at(tau) - d.a_at(tau) - d.c_before_at(tau)
            found = c.expect(
                value_at(c.vs, S),
                condexp(stopped, before_s, c.space),
                partition=before_s,
                S=S,
                tau=tau,
                alpha=format_rational(alpha),
                note="V(S) differs from E[M - A - C_- at tau_alpha | before S]",
            )
            if found:
                return found
    return None


def _first_contact_representation(c: SuiteContext) -> Optional[Witness]:
    for S in c.starts():
        c.tick(len(c.above(S)))
        report = representation_check(c.vs, S, c.budget)
        if not report.ok:
            return _from_report(report, S=S)
    return None


def _hat_time_optimal(c: SuiteContext) -> Optional[Witness]:
    for S in c.starts():
        hat = tau_hat(c.vs, S)
        c.tick(len(c.above(S)))
        result = criterion_check(c.vs, S, hat, c.budget)
        if not (result.optimal and result.cond1 and result.cond2):
            return Witness(
                S=S,
                tau=hat,
                note="first contact time fails the criterion",
                extra=result.to_dict(),
            )
    return None


def _penalized_envelope_identity(c: SuiteContext) -> Optional[Witness]:
    v = c.vs.v
    for alpha in ALPHA_LEVELS:
        label = format_rational(alpha)
        capped = RewardFamily.of(
            v[t].on(_where(v[t], lambda w, t=t: alpha * v[t][w] <= c.family[t][w]))
            for t in c.filt.times
        )
        envelope = value_backward(capped, c.filt)
        for t in c.filt.times:
            found = c.expect(
                envelope.v[t],
                v[t],
                partition=c.filt.pre[t],
                t=t,
                alpha=label,
                note="value of V 1{alpha V <= phi} differs from V",
            )
            if found:
                return found
    return None


def _classical_value_dominates(c: SuiteContext) -> Optional[Witness]:
    classical = classical_value_backward(c.family, c.filt)
    for t in c.filt.times:
        pre = c.filt.pre[t]
        found = c.expect(
            condexp(classical[t], pre, c.space),
            c.vs.v[t],
            GE,
            partition=pre,
            t=t,
            note="classical value projected before t lies below the predictable "
            "value",
        )
        if found:
            return found
    return None


_EVERY_S = "every predictable S within budget"
_ALPHAS = "alpha in 1/4, 1/2, 3/4, 9/10"
_NO_CONTINUUM = "left limits need a continuum of times; a finite grid has none"

REGISTRY: Tuple[PropertyDescriptor, ...] = (
    PropertyDescriptor(
        "oracle-equivalence",
        "V(t) and V+(t) from backward induction equal the brute-force suprema "
        "over predictable times",
        "every grid time t",
        _oracle_equivalence,
    ),
    PropertyDescriptor(
        "aggregation",
        "V(S) = ess sup_{tau >= S} E[phi(tau) | before S] and V+(S) = the strict "
        "supremum, read pointwise",
        _EVERY_S,
        _aggregation,
    ),
    PropertyDescriptor(
        "lattice-max-closure",
        "the family {E[phi(tau) | before S]} is closed under pairwise "
        "maximization by gluing",
        f"{_EVERY_S}; pairs tau, tau' >= S",
        _lattice_max_closure,
    ),
    PropertyDescriptor(
        "optimizing-sequence",
        "an increasing sequence of glued times attains V(S) and V+(S)",
        f"{_EVERY_S}; both the plain and the strict class",
        _optimizing_sequence,
    ),
    PropertyDescriptor(
        "bellman-scaled",
        "E[alpha V(theta) | before S] = ess sup_{tau >= theta} "
        "E[alpha phi(tau) | before S], also strictly",
        f"{_EVERY_S}; every theta >= S; constant and two-valued alpha known "
        "before S",
        _bellman_scaled,
    ),
    PropertyDescriptor(
        "value-scaling",
        "the value of the reward alpha phi equals alpha V(tau) for tau >= S, "
        "also strictly",
        f"{_EVERY_S}; every tau >= S; constant and two-valued alpha known "
        "before S",
        _value_scaling,
    ),
    PropertyDescriptor(
        "localized-agreement",
        "V^A(tau) = V^A(tau') for A = {tau = tau'}, also strictly",
        "every pair of predictable times",
        _localized_agreement,
    ),
    PropertyDescriptor(
        "strict-value-dominates",
        "E[phi(tau) | before theta] <= V+(theta) on {tau > theta}, and "
        "1_B E[phi(tau) | before theta] <= V^{B+}(theta)",
        "every pair of predictable times, both orders",
        _strict_value_dominates,
    ),
    PropertyDescriptor(
        "localization",
        "V^A(tau) = 1_A V(tau) and V^{A+}(tau) = 1_A V+(tau) for A known "
        "before S and tau >= S",
        f"{_EVERY_S}; every event known before S; every tau >= S",
        _localization,
    ),
    PropertyDescriptor(
        "localization-additivity",
        "V(tau) = V^A(tau) + V^(A^c)(tau)",
        f"{_EVERY_S}; every event known before S; every tau >= S",
        _localization_additivity,
    ),
    PropertyDescriptor(
        "value-admissibility",
        "V(tau) and V+(tau) are nonnegative, known before tau, and agree on "
        "{tau = tau'}",
        "every predictable time and pair",
        _value_admissibility,
    ),
    PropertyDescriptor(
        "localized-martingale-system",
        "1_A V is a martingale system on the predictable times between S and "
        "the maximal optimal time",
        f"{_EVERY_S}; every event known before S; every ordered pair",
        _localized_martingale_system,
    ),
    PropertyDescriptor(
        "snell-supermartingale",
        "V dominates phi and is a predictable supermartingale system",
        "every grid time; every pair of predictable times",
        _snell_supermartingale,
    ),
    PropertyDescriptor(
        "snell-minimality",
        "every predictable supermartingale system above phi dominates V",
        "seeded candidate systems checked at every predictable time",
        _snell_minimality,
    ),
    PropertyDescriptor(
        "value-reward-strict-max",
        "V(S) = max(phi(S), V+(S))",
        _EVERY_S,
        _value_reward_strict_max,
    ),
    PropertyDescriptor(
        "strict-value-bound",
        "E[V(tau) | before S] <= V+(S) for tau strictly after S",
        f"{_EVERY_S}; every tau in the strict class",
        _strict_value_bound,
    ),
    PropertyDescriptor(
        "right-limit-bounds",
        "E[V(tau) | before S] <= E[V(S+) | before S] = V+(S) for tau strictly "
        "after S",
        f"{_EVERY_S}; every tau in the strict class",
        _right_limit_bounds,
    ),
    PropertyDescriptor(
        "right-limit-below-value",
        "E[V(S+) | before S] <= V(S)",
        _EVERY_S,
        _right_limit_below_value,
    ),
    PropertyDescriptor(
        "value-recursion",
        "V(S) = max(phi(S), E[V(S+) | before S]), also with E[phi(S) | before S]",
        _EVERY_S,
        _value_recursion,
    ),
    PropertyDescriptor(
        "gap-supported-on-contact",
        "V(S) = E[V(S+) | before S] on {S < N, V(S) > phi(S)}",
        _EVERY_S,
        _gap_supported_on_contact,
    ),
    PropertyDescriptor(
        "strict-value-supermartingale",
        "V+ is a predictable supermartingale system",
        "every pair of predictable times",
        _strict_value_supermartingale,
    ),
    PropertyDescriptor(
        "optimality-criterion",
        "tau* >= S is optimal iff V(tau*) = phi(tau*) and V is a martingale "
        "system on [S, tau*]",
        f"{_EVERY_S}; tau_hat(S) and every tau* >= S",
        _optimality_criterion,
    ),
    PropertyDescriptor(
        "optimal-set-closure",
        "the martingale-interval set is closed under pointwise maximum and its "
        "maximum is optimal",
        _EVERY_S,
        _optimal_set_closure,
    ),
    PropertyDescriptor(
        "martingale-interval-equivalence",
        "the one-step test V = V+ on {S <= t < tau} matches the pairwise "
        "martingale-system definition",
        f"{_EVERY_S}; every tau >= S",
        _martingale_interval_equivalence,
    ),
    PropertyDescriptor(
        "penalization-cover",
        "alpha V(tau_alpha(S)) <= phi(tau_alpha(S)) and tau_alpha(S) is the "
        "minimum of the penalized set",
        f"{_EVERY_S}; {_ALPHAS}",
        _penalization_cover,
    ),
    PropertyDescriptor(
        "penalization-stationarity",
        "tau_alpha(S) is nondecreasing in alpha, bounded by tau_hat(S), and "
        "equals it beyond alpha*",
        f"{_EVERY_S}; {_ALPHAS}, (1 + alpha*)/2 and alpha*",
        _penalization_stationarity,
    ),
    PropertyDescriptor(
        "mertens-decomposition",
        "V = M - A - C_- with M a martingale, A = 0, C nondecreasing, "
        "predictable and flat off {V = phi}",
        "every grid time; M checked as a martingale system at every "
        "predictable time",
        _mertens_decomposition,
    ),
    PropertyDescriptor(
        "flat-before-optimal",
        "C does not grow on [S, tau_alpha(S)) nor on [S, tau_hat(S)), and "
        "V(S) = E[M - A - C_- at tau_alpha | before S]",
        f"{_EVERY_S}; {_ALPHAS}",
        _flat_before_optimal,
    ),
    PropertyDescriptor(
        "first-contact-representation",
        "V(S) = E[phi(tau_hat(S)) | before S], tau_hat(S) attains the optimum, "
        "and the contact events off the grid are null",
        _EVERY_S,
        _first_contact_representation,
    ),
    PropertyDescriptor(
        "hat-time-optimal",
        "tau_hat(S) satisfies both criterion conditions and is optimal",
        _EVERY_S,
        _hat_time_optimal,
    ),
    PropertyDescriptor(
        "penalized-envelope-identity",
        "the value of the reward V(t) 1{alpha V(t) <= phi_t} equals V",
        f"every grid time; {_ALPHAS}",
        _penalized_envelope_identity,
    ),
    PropertyDescriptor(
        "classical-value-dominates",
        "E[classical value(t) | pre-partition at t] >= V(t)",
        "every grid time",
        _classical_value_dominates,
    ),
    PropertyDescriptor(
        "left-limit-recursion",
        "V(S-) = max(phi(S-), V(S)) for the left-limit value",
        _NO_CONTINUUM,
    ),
    PropertyDescriptor(
        "left-limit-domination",
        "V(S-) dominates E[V(S) | before S]",
        _NO_CONTINUUM,
    ),
    PropertyDescriptor(
        "right-continuous-value-equality",
        "V coincides with the right-continuous envelope where phi is right "
        "upper semicontinuous",
        "path regularity is vacuous on a finite grid",
    ),
    PropertyDescriptor(
        "left-limited-families",
        "V admits left limits along announcing sequences",
        "announcing sequences do not exist on a finite grid",
    ),
    PropertyDescriptor(
        "contact-trichotomy",
        "the first contact splits into left, exact and right contact events",
        "left and right contact are empty on a finite grid; their masses are "
        "reported by first-contact-representation",
    ),
)

PROPERTIES: Dict[str, PropertyDescriptor] = {d.id: d for d in REGISTRY}


def registry() -> List[PropertyDescriptor]:
    return list(REGISTRY)
