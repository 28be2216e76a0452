"""
Finite Filtered Probability Spaces

Substrate for the stopping engine:
- SampleSpace: ordered outcomes with strictly positive rational masses
- Partition: the atoms of a finite sigma-algebra
- TwoSlotFiltration: per grid time a pre-partition (information strictly
  before t) and a post-partition (information at t)
- RandomVar: exact rational values aligned with the outcome order

Outcomes are addressed by their position in SampleSpace.outcomes; the
string ids only appear at the serialization boundary.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from src.core.rationals import format_rational
from src.core.shared.exceptions import NotFoundError, ValidationError
from src.engine.checks import CheckReport

logger = logging.getLogger(__name__)

Scalar = Fraction | int


@dataclass(frozen=True)
class SampleSpace:
    """Finite outcome set with exact probabilities."""

    outcomes: Tuple[str, ...]
    prob: Tuple[Fraction, ...]

    @classmethod
    def uniform(cls, outcomes: Sequence[str]) -> SampleSpace:
        n = len(outcomes)
        return cls(tuple(outcomes), tuple(Fraction(1, n) for _ in outcomes))

    def __len__(self) -> int:
        return len(self.outcomes)

    @cached_property
    def omega(self) -> frozenset[int]:
        return frozenset(range(len(self.outcomes)))

    @cached_property
    def _positions(self) -> Dict[str, int]:
        return {outcome: i for i, outcome in enumerate(self.outcomes)}

    def index(self, outcome_id: str) -> int:
        try:
            return self._positions[outcome_id]
        except KeyError:
            raise NotFoundError(
                detail=f"unknown outcome {outcome_id!r}",
                context={"outcome": outcome_id},
            ) from None

    def event(self, outcome_ids: Iterable[str]) -> frozenset[int]:
        return frozenset(self.index(o) for o in outcome_ids)

    def ids(self, event: Iterable[int]) -> List[str]:
        return [self.outcomes[i] for i in sorted(event)]

    def mass(self, event: Iterable[int]) -> Fraction:
        return sum((self.prob[i] for i in event), Fraction(0))

    def expectation(self, x: RandomVar) -> Fraction:
        return sum((p * v for p, v in zip(self.prob, x.values)), Fraction(0))


@dataclass(frozen=True)
class Partition:
    """Atoms of a sigma-algebra on a finite space, kept in canonical order."""

    blocks: Tuple[frozenset[int], ...]

    @classmethod
    def of(cls, blocks: Iterable[Iterable[int]]) -> Partition:
        frozen = [frozenset(b) for b in blocks]
        frozen.sort(key=lambda b: (min(b) if b else -1, len(b)))
        return cls(tuple(frozen))

    @classmethod
    def trivial(cls, n: int) -> Partition:
        return cls((frozenset(range(n)),)) if n else cls(())

    @classmethod
    def discrete(cls, n: int) -> Partition:
        return cls(tuple(frozenset({i}) for i in range(n)))

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self) -> Iterator[frozenset[int]]:
        return iter(self.blocks)

    @cached_property
    def _owner(self) -> Dict[int, int]:
        return {w: k for k, block in enumerate(self.blocks) for w in block}

    def block_of(self, outcome: int) -> frozenset[int]:
        return self.blocks[self._owner[outcome]]

    def problems(self, omega: frozenset[int]) -> List[str]:
        """Reasons why the blocks fail to partition omega (empty when valid)."""
        issues = []
        if any(not block for block in self.blocks):
            issues.append("empty block")
        seen: set[int] = set()
        for block in self.blocks:
            if seen & block:
                issues.append("overlapping blocks")
                break
            seen |= block
        if seen - omega:
            issues.append("blocks mention unknown outcomes")
        if omega - seen:
            issues.append("blocks do not cover the outcome set")
        return issues

    def is_coarser_than(self, other: Partition) -> bool:
        """Every block of other sits inside one block of self."""
        owner = self._owner
        for block in other.blocks:
            owners = {owner.get(w) for w in block}
            if len(owners) != 1 or None in owners:
                return False
        return True

    def is_strictly_coarser_than(self, other: Partition) -> bool:
        return self.is_coarser_than(other) and len(self) < len(other)

    def measures(self, event: Iterable[int]) -> bool:
        """True iff the event is a union of blocks."""
        event = frozenset(event)
        return all(block <= event or not (block & event) for block in self.blocks)

    def blocks_within(self, event: Iterable[int]) -> List[frozenset[int]]:
        event = frozenset(event)
        return [block for block in self.blocks if block <= event]


@dataclass(frozen=True)
class RandomVar:
    """Exact rational random variable, one value per outcome position."""

    values: Tuple[Fraction, ...]

    @classmethod
    def of(cls, values: Iterable[Scalar]) -> RandomVar:
        return cls(tuple(Fraction(v) for v in values))

    @classmethod
    def constant(cls, n: int, c: Scalar) -> RandomVar:
        return cls((Fraction(c),) * n)

    @classmethod
    def indicator(cls, n: int, event: Iterable[int]) -> RandomVar:
        event = frozenset(event)
        return cls(tuple(Fraction(1 if w in event else 0) for w in range(n)))

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, outcome: int) -> Fraction:
        return self.values[outcome]

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.values)

    def _other(self, other: RandomVar | Scalar) -> Tuple[Fraction, ...]:
        if isinstance(other, RandomVar):
            if len(other) != len(self):
                raise ValidationError(
                    detail="random variables live on spaces of different size",
                    context={"left": len(self), "right": len(other)},
                )
            return other.values
        return (Fraction(other),) * len(self.values)

    def __add__(self, other: RandomVar | Scalar) -> RandomVar:
        return RandomVar(tuple(a + b for a, b in zip(self.values, self._other(other))))

    __radd__ = __add__

    def __sub__(self, other: RandomVar | Scalar) -> RandomVar:
        return RandomVar(tuple(a - b for a, b in zip(self.values, self._other(other))))

    def __mul__(self, other: RandomVar | Scalar) -> RandomVar:
        return RandomVar(tuple(a * b for a, b in zip(self.values, self._other(other))))

    __rmul__ = __mul__

    def maximum(self, other: RandomVar | Scalar) -> RandomVar:
        pairs = zip(self.values, self._other(other))
        return RandomVar(tuple(max(a, b) for a, b in pairs))

    def minimum(self, other: RandomVar | Scalar) -> RandomVar:
        pairs = zip(self.values, self._other(other))
        return RandomVar(tuple(min(a, b) for a, b in pairs))

    def on(self, event: Iterable[int]) -> RandomVar:
        """Zero outside the event."""
        event = frozenset(event)
        return RandomVar(
            tuple(v if w in event else Fraction(0) for w, v in enumerate(self.values))
        )

    def first_violation(
        self,
        other: RandomVar | Scalar,
        relation: Callable[[Fraction, Fraction], bool],
        on: Optional[Iterable[int]] = None,
    ) -> Optional[int]:
        """First outcome (in outcome order) where relation(self, other) fails."""
        scope = None if on is None else frozenset(on)
        for w, (a, b) in enumerate(zip(self.values, self._other(other))):
            if scope is not None and w not in scope:
                continue
            if not relation(a, b):
                return w
        return None

    def leq(
        self, other: RandomVar | Scalar, on: Optional[Iterable[int]] = None
    ) -> bool:
        return self.first_violation(other, _le, on) is None

    def equals(
        self, other: RandomVar | Scalar, on: Optional[Iterable[int]] = None
    ) -> bool:
        return self.first_violation(other, _eq, on) is None

    def event_where(self, predicate: Callable[[Fraction], bool]) -> frozenset[int]:
        return frozenset(w for w, v in enumerate(self.values) if predicate(v))

    def is_nonnegative(self) -> bool:
        return all(v >= 0 for v in self.values)

    def as_strings(self, space: SampleSpace) -> Dict[str, str]:
        return {o: format_rational(v) for o, v in zip(space.outcomes, self.values)}


def _le(a: Fraction, b: Fraction) -> bool:
    return a <= b


def _eq(a: Fraction, b: Fraction) -> bool:
    return a == b


@dataclass(frozen=True)
class TwoSlotFiltration:
    """Refinement chain Q_0 <= P_0 <= Q_1 <= ... <= Q_N <= P_N over a sample space.

    pre[t] (Q_t) carries the information strictly before t, post[t] (P_t) the
    information at t. Quasi-left-continuity fails at t when Q_t is strictly
    coarser than P_t.
    """

    space: SampleSpace
    horizon: int
    pre: Tuple[Partition, ...]
    post: Tuple[Partition, ...]

    def __hash__(self) -> int:
        return self._hash

    @cached_property
    def _hash(self) -> int:
        return hash((self.space, self.horizon, self.pre, self.post))

    @property
    def times(self) -> range:
        return range(self.horizon + 1)

    def qlc_failures(self) -> List[int]:
        return [
            t for t in self.times if self.pre[t].is_strictly_coarser_than(self.post[t])
        ]


def condexp(x: RandomVar, b: Partition, space: SampleSpace) -> RandomVar:
    """Conditional expectation of x given the sigma-algebra generated by b."""
    out = list(x.values)
    prob = space.prob
    for block in b.blocks:
        mass = sum((prob[w] for w in block), Fraction(0))
        mean = sum((prob[w] * x.values[w] for w in block), Fraction(0)) / mass
        for w in block:
            out[w] = mean
    return RandomVar(tuple(out))


def is_measurable(x: RandomVar, b: Partition) -> bool:
    """True iff x is constant on every block of b."""
    for block in b.blocks:
        first = x.values[next(iter(block))]
        if any(x.values[w] != first for w in block):
            return False
    return True


def generated_partition(sets: Iterable[Iterable[int]], space: SampleSpace) -> Partition:
    """Atoms of the sigma-algebra generated by the given events."""
    members = list({frozenset(s) for s in sets})
    stray = set().union(*members) - space.omega if members else set()
    if stray:
        raise ValidationError(
            detail="generator sets mention unknown outcomes",
            context={"outcomes": sorted(stray)},
        )
    atoms: Dict[Tuple[bool, ...], List[int]] = {}
    for w in range(len(space)):
        atoms.setdefault(tuple(w in s for s in members), []).append(w)
    return Partition.of(atoms.values())


def validate_space(space: SampleSpace, filt: TwoSlotFiltration) -> CheckReport:
    """Check every invariant of the sample space and of the filtration."""
    report = CheckReport("validate_space")

    if not space.outcomes:
        report.add("empty_space", "sample space has no outcomes")
        return report
    if len(set(space.outcomes)) != len(space.outcomes):
        duplicates = sorted({o for o in space.outcomes if space.outcomes.count(o) > 1})
        report.add(
            "duplicate_outcome",
            "outcome identifiers are not unique",
            outcomes=duplicates,
        )
    if len(space.prob) != len(space.outcomes):
        report.add("probability_arity", "one probability per outcome is required")
        return report
    for outcome, p in zip(space.outcomes, space.prob):
        if p <= 0:
            report.add(
                "nonpositive_probability",
                f"probability of {outcome!r} is {format_rational(p)}, must be positive",
                outcome=outcome,
            )
    total = sum(space.prob, Fraction(0))
    if total != 1:
        report.add("probability_sum", f"probabilities sum to {format_rational(total)}")

    if filt.space != space:
        report.add("foreign_space", "filtration is built on a different sample space")
        return report
    n_times = filt.horizon + 1
    if filt.horizon < 0:
        report.add("horizon", f"horizon must be nonnegative, got {filt.horizon}")
        return report
    if len(filt.pre) != n_times or len(filt.post) != n_times:
        report.add(
            "slot_count",
            f"expected {n_times} pre and post partitions, "
            f"got {len(filt.pre)} and {len(filt.post)}",
        )
        return report

    well_formed = True
    for t in filt.times:
        for slot, partition in (("pre", filt.pre[t]), ("post", filt.post[t])):
            for issue in partition.problems(space.omega):
                well_formed = False
                report.add(
                    "not_a_partition",
                    f"{slot} blocks at t={t} are not a partition: {issue}",
                    t=t,
                    slot=slot,
                )
    if not well_formed:
        return report

    if len(filt.pre[0]) != 1:
        report.add(
            "nontrivial_initial",
            "pre-partition at t=0 must be the trivial partition",
            t=0,
        )
    for t in filt.times:
        if not filt.pre[t].is_coarser_than(filt.post[t]):
            report.add(
                "refinement_chain",
                f"refinement chain broken at t={t}: "
                "pre-partition is not coarser than post-partition",
                t=t,
            )
        if t < filt.horizon and not filt.post[t].is_coarser_than(filt.pre[t + 1]):
            report.add(
                "refinement_chain",
                f"refinement chain broken at t={t}: post-partition is not coarser than "
                f"the pre-partition at t={t + 1}",
                t=t,
            )
    if report.ok:
        logger.debug(
            "space with %d outcomes validated; qlc fails at %s",
            len(space),
            filt.qlc_failures(),
        )
    return report
