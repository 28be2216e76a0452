"""
Stopping Times on the Two-Slot Grid

A stopping time maps each outcome position to a grid time in [0, N].
- stopping: {tau <= t} is a union of post-blocks P_t for every t
- predictable: {tau = t} is a union of pre-blocks Q_t for every t

Also provides the pre-tau sigma-algebra, the exhaustive enumeration of the
predictable class above a time S, and the pointwise gluing/lattice
operations.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Dict, Iterable, List, Sequence, Tuple

from src.core.shared.exceptions import (
    BudgetExceededError,
    NotPredictableError,
    ValidationError,
)
from src.engine.filtered_space import (
    Partition,
    RandomVar,
    SampleSpace,
    TwoSlotFiltration,
    generated_partition,
)

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 20_000


@dataclass(frozen=True)
class StoppingTime:
    time: Tuple[int, ...]

    @classmethod
    def constant(cls, n: int, t: int) -> StoppingTime:
        return cls((t,) * n)

    @classmethod
    def of(cls, times: Iterable[int]) -> StoppingTime:
        return cls(tuple(int(t) for t in times))

    def __len__(self) -> int:
        return len(self.time)

    def __getitem__(self, outcome: int) -> int:
        return self.time[outcome]

    def is_constant(self) -> bool:
        return len(set(self.time)) <= 1

    def dominates(self, other: StoppingTime) -> bool:
        """other <= self pointwise."""
        return all(b <= a for a, b in zip(self.time, other.time))

    def where_eq(self, t: int) -> frozenset[int]:
        return frozenset(w for w, s in enumerate(self.time) if s == t)

    def where_gt(self, t: int) -> frozenset[int]:
        return frozenset(w for w, s in enumerate(self.time) if s > t)

    def where_ge(self, t: int) -> frozenset[int]:
        return frozenset(w for w, s in enumerate(self.time) if s >= t)

    def where_le(self, t: int) -> frozenset[int]:
        return frozenset(w for w, s in enumerate(self.time) if s <= t)

    def as_map(self, space: SampleSpace) -> Dict[str, int]:
        return dict(zip(space.outcomes, self.time))

    def describe(self, space: SampleSpace) -> str:
        if self.is_constant() and self.time:
            return f"const {self.time[0]}"
        pairs = zip(space.outcomes, self.time)
        return "(" + ", ".join(f"{o}:{t}" for o, t in pairs) + ")"


class StoppingClass(str, Enum):
    NOT_STOPPING = "not_stopping"
    STOPPING = "stopping"
    PREDICTABLE = "predictable"


def _check_range(tau: StoppingTime, filt: TwoSlotFiltration) -> None:
    if len(tau) != len(filt.space):
        raise ValidationError(
            detail=(
                f"stopping time has {len(tau)} entries "
                f"for {len(filt.space)} outcomes"
            ),
        )
    stray = [t for t in tau.time if not 0 <= t <= filt.horizon]
    if stray:
        raise ValidationError(
            detail=f"stopping time takes value {stray[0]} outside [0, {filt.horizon}]",
            context={"time": stray[0], "horizon": filt.horizon},
        )


@lru_cache(maxsize=4096)
def classify(tau: StoppingTime, filt: TwoSlotFiltration) -> StoppingClass:
    _check_range(tau, filt)
    if all(filt.pre[t].measures(tau.where_eq(t)) for t in filt.times):
        return StoppingClass.PREDICTABLE
    if all(filt.post[t].measures(tau.where_le(t)) for t in filt.times):
        return StoppingClass.STOPPING
    return StoppingClass.NOT_STOPPING


def is_predictable(tau: StoppingTime, filt: TwoSlotFiltration) -> bool:
    return classify(tau, filt) is StoppingClass.PREDICTABLE


def require_predictable(
    tau: StoppingTime, filt: TwoSlotFiltration, role: str = "tau"
) -> None:
    kind = classify(tau, filt)
    if kind is not StoppingClass.PREDICTABLE:
        described = kind.value.replace("_", " ")
        raise NotPredictableError(
            detail=(
                f"{role} = {tau.describe(filt.space)} is {described}, "
                "not predictable"
            ),
            context={
                "role": role,
                "time": tau.as_map(filt.space),
                "class": kind.value,
            },
        )


@lru_cache(maxsize=4096)
def pre_sigma(tau: StoppingTime, filt: TwoSlotFiltration) -> Partition:
    """Atoms of the sigma-algebra of events strictly before tau."""
    require_predictable(tau, filt)
    generators: List[frozenset[int]] = []
    for t in filt.times:
        if t < filt.horizon:
            later = tau.where_gt(t)
            generators.extend(block & later for block in filt.post[t].blocks)
        reached = tau.where_ge(t)
        generators.extend(block & reached for block in filt.pre[t].blocks)
    return generated_partition(generators, filt.space)


def evaluate(process: Sequence[RandomVar], tau: StoppingTime) -> RandomVar:
    """The process read at tau: X_tau(w) = X_{tau(w)}(w)."""
    return RandomVar(tuple(process[t].values[w] for w, t in enumerate(tau.time)))


def lower_bound(S: StoppingTime, horizon: int, strict: bool) -> Tuple[int, ...]:
    """Earliest admissible time per outcome for the class above S."""
    if not strict:
        return S.time
    return tuple(s + 1 if s < horizon else horizon for s in S.time)


def enumerate_predictable(
    filt: TwoSlotFiltration,
    S: StoppingTime,
    strict: bool = False,
    budget: int = DEFAULT_BUDGET,
) -> Tuple[StoppingTime, ...]:
    """Every predictable tau >= S (strict: tau > S on {S<N}, tau = N on {S=N}).

    Built recursively over t by choosing {tau = t} as a union of pre-blocks of
    the region not yet stopped, so each time is produced exactly once. The
    result is sorted lexicographically in outcome order.

    Raises:
        NotPredictableError: if S is not predictable
        BudgetExceededError: if more than `budget` times exist
    """
    require_predictable(S, filt, "S")
    return _enumerate(filt, S, strict, budget)


@lru_cache(maxsize=1024)
def _enumerate(
    filt: TwoSlotFiltration, S: StoppingTime, strict: bool, budget: int
) -> Tuple[StoppingTime, ...]:
    horizon = filt.horizon
    earliest = lower_bound(S, horizon, strict)
    assignment = [horizon] * len(filt.space)
    found: List[Tuple[int, ...]] = []

    def record() -> None:
        found.append(tuple(assignment))
        if len(found) > budget:
            raise BudgetExceededError(
                detail=f"more than {budget} predictable stopping times above S",
                context={"budget": budget, "strict": strict},
            )

    def descend(t: int, remaining: frozenset[int]) -> None:
        if not remaining:
            record()
            return
        if t == horizon:
            for w in remaining:
                assignment[w] = horizon
            record()
            return
        choices = [
            block
            for block in filt.pre[t].blocks
            if block <= remaining and all(earliest[w] <= t for w in block)
        ]
        for mask in range(1 << len(choices)):
            stopped = frozenset().union(
                *(block for k, block in enumerate(choices) if mask >> k & 1)
            )
            for w in stopped:
                assignment[w] = t
            descend(t + 1, remaining - stopped)

    descend(0, filt.space.omega)
    found.sort()
    logger.debug("enumerated %d predictable times (strict=%s)", len(found), strict)
    return tuple(StoppingTime(times) for times in found)


def glue(tau1: StoppingTime, tau2: StoppingTime, event: Iterable[int]) -> StoppingTime:
    """tau1 on the event, tau2 off it."""
    event = frozenset(event)
    return StoppingTime(
        tuple(
            a if w in event else b
            for w, (a, b) in enumerate(zip(tau1.time, tau2.time))
        )
    )


def lattice(
    tau1: StoppingTime, tau2: StoppingTime
) -> Tuple[StoppingTime, StoppingTime]:
    """Pointwise (min, max)."""
    pairs = list(zip(tau1.time, tau2.time))
    return (
        StoppingTime(tuple(min(a, b) for a, b in pairs)),
        StoppingTime(tuple(max(a, b) for a, b in pairs)),
    )


def successor(S: StoppingTime, horizon: int) -> StoppingTime:
    """(S + 1) capped at the horizon; the grid right limit of S."""
    return StoppingTime(tuple(min(s + 1, horizon) for s in S.time))


def pointwise_min(times: Sequence[StoppingTime]) -> StoppingTime:
    columns = zip(*(tau.time for tau in times))
    return StoppingTime(tuple(min(column) for column in columns))


def pointwise_max(times: Sequence[StoppingTime]) -> StoppingTime:
    columns = zip(*(tau.time for tau in times))
    return StoppingTime(tuple(max(column) for column in columns))


def in_class(tau: StoppingTime, S: StoppingTime, horizon: int, strict: bool) -> bool:
    """tau belongs to the class above S (membership test without enumeration)."""
    earliest = lower_bound(S, horizon, strict)
    if not all(a >= b for a, b in zip(tau.time, earliest)):
        return False
    if strict:
        return all(t == horizon for t, s in zip(tau.time, S.time) if s == horizon)
    return True


