"""
Discrete Mertens Decomposition

    V(t) = M_t - A_t - C_{t-1}

with C_{-1} = 0 and increments dC_t = V(t) - V+(t) >= 0 stored as
nonnegative magnitudes. A is identically zero on the grid: every decrement
between consecutive instants is known before t and is booked into C. M is a
martingale for the pre-partitions.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple

from src.core.rationals import format_rational
from src.core.shared.exceptions import EngineInvariantError, ValidationError
from src.engine.checks import CheckReport
from src.engine.filtered_space import RandomVar, condexp, is_measurable
from src.engine.snell import ValueSystem
from src.engine.stopping_times import StoppingTime, evaluate

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MertensDecomposition:
    """M, A and C of a value system; c[0] holds C_{-1} and c[t + 1] holds C_t."""

    m: Tuple[RandomVar, ...]
    a: Tuple[RandomVar, ...]
    c: Tuple[RandomVar, ...]
    contact: Tuple[frozenset[int], ...]
    values: ValueSystem

    @property
    def horizon(self) -> int:
        return len(self.m) - 1

    def c_before(self, t: int) -> RandomVar:
        """C_{t-1}."""
        return self.c[t]

    def delta_c(self, t: int) -> RandomVar:
        return self.c[t + 1] - self.c[t]

    def m_at(self, tau: StoppingTime) -> RandomVar:
        return evaluate(self.m, tau)

    def a_at(self, tau: StoppingTime) -> RandomVar:
        return evaluate(self.a, tau)

    def c_before_at(self, tau: StoppingTime) -> RandomVar:
        """C_{tau-1} read pointwise."""
        return evaluate(self.c[: self.horizon + 1], tau)


def decompose(vs: ValueSystem) -> MertensDecomposition:
    """Build (M, A, C) and assert the decomposition identities.

    Raises:
        EngineInvariantError: if an identity fails (never expected on a valid system)
    """
    filt = vs.filtration
    n = len(filt.space)
    zero = RandomVar.constant(n, 0)
    c: List[RandomVar] = [zero]
    m: List[RandomVar] = []
    for t in filt.times:
        m.append(vs.v[t] + c[t])
        c.append(c[t] + (vs.v[t] - vs.v_plus[t]))
    decomposition = MertensDecomposition(
        m=tuple(m),
        a=tuple(zero for _ in filt.times),
        c=tuple(c),
        contact=tuple(vs.contact(t) for t in filt.times),
        values=vs,
    )
    report = check_identities(decomposition)
    if not report.ok:
        raise EngineInvariantError(
            detail=f"decomposition identity failed: {report.first().message}",
            context=report.to_dict(),
        )
    return decomposition


def check_identities(d: MertensDecomposition) -> CheckReport:
    """Reconstruction, compensator monotonicity and measurability, martingality of M."""
    report = CheckReport("mertens_identities")
    vs = d.values
    filt = vs.filtration
    space = filt.space
    for t in filt.times:
        rebuilt = d.m[t] - d.a[t] - d.c_before(t)
        w = rebuilt.first_violation(vs.v[t], _equal)
        if w is not None:
            report.add(
                "reconstruction",
                f"M - A - C differs from V at t={t}",
                t=t,
                outcome=space.outcomes[w],
                lhs=format_rational(rebuilt[w]),
                rhs=format_rational(vs.v[t][w]),
            )
        jump = d.delta_c(t)
        if not jump.is_nonnegative():
            report.add("compensator_decreasing", f"C decreases at t={t}", t=t)
        if not is_measurable(jump, filt.pre[t]):
            report.add(
                "compensator_not_predictable",
                f"dC is not measurable for the pre-partition at t={t}",
                t=t,
            )
        if any(x != 0 for x in d.a[t].values):
            report.add("nonzero_a", f"A is not zero at t={t}", t=t)
        if t < filt.horizon:
            projected = condexp(d.m[t + 1], filt.pre[t], space)
            w = projected.first_violation(d.m[t], _equal)
            if w is not None:
                report.add(
                    "martingale",
                    f"E[M_{t + 1} | Q_{t}] differs from M_{t}",
                    t=t,
                    outcome=space.outcomes[w],
                    lhs=format_rational(projected[w]),
                    rhs=format_rational(d.m[t][w]),
                )
    return report


def flat_off_contact_check(d: MertensDecomposition) -> CheckReport:
    """dC_t vanishes wherever V(t) > phi_t."""
    report = CheckReport("flat_off_contact")
    space = d.values.filtration.space
    for t in range(d.horizon + 1):
        jump = d.delta_c(t)
        for w in range(len(space)):
            if w not in d.contact[t] and jump[w] != 0:
                report.add(
                    "compensator_off_contact",
                    f"dC_{t} = {format_rational(jump[w])} at "
                    f"{space.outcomes[w]!r} where V > phi",
                    t=t,
                    outcome=space.outcomes[w],
                    lhs=format_rational(jump[w]),
                    rhs="0",
                )
    return report


def flat_before(
    d: MertensDecomposition, tau: StoppingTime, S: StoppingTime
) -> CheckReport:
    """C_{tau-1} = C_{S-1}: the compensator does not grow on [S, tau)."""
    space = d.values.filtration.space
    if not tau.dominates(S):
        raise ValidationError(
            detail="flat_before needs S <= tau pointwise",
            context={"tau": tau.as_map(space), "S": S.as_map(space)},
        )
    report = CheckReport("flat_before")
    at_tau = d.c_before_at(tau)
    at_s = d.c_before_at(S)
    for w in range(len(space)):
        if at_tau[w] != at_s[w]:
            report.add(
                "compensator_growth",
                f"C grows by {format_rational(at_tau[w] - at_s[w])} "
                f"on [{S[w]}, {tau[w]}) "
                f"at {space.outcomes[w]!r}",
                outcome=space.outcomes[w],
                t=tau[w],
                lhs=format_rational(at_tau[w]),
                rhs=format_rational(at_s[w]),
            )
    return report


def _equal(a: Fraction, b: Fraction) -> bool:
    return a == b
