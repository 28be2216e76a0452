"""
Suite Context

Shared state for one property run over one instance:
- the value system under test (overridable, for mutation tests)
- quantifier sets: start times S, times above S, alpha factors, events known
  before S, each element charged to the check budget
- a cache of enumerations and brute-force oracle values
- a tick counter enforcing the per-property check budget
- a deterministic random generator seeded from the instance digest and the property id
"""

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import (
    Any,
    Callable,
    Dict,
    Iterable,
    Iterator,
    List,
    Optional,
    Sequence,
    Tuple,
    TypeVar,
)

import numpy as np

from src.core.rationals import format_rational
from src.core.shared.exceptions import BadRequestError, BudgetExceededError
from src.engine.decomposition import MertensDecomposition, decompose
from src.engine.filtered_space import Partition, RandomVar
from src.engine.optimal_stop import ALPHA_LEVELS
from src.engine.snell import ValueSystem, value_backward, value_bruteforce
from src.engine.stopping_times import (
    DEFAULT_BUDGET,
    StoppingTime,
    enumerate_predictable,
    pre_sigma,
)
from src.models.instance import Instance

T = TypeVar("T")

Relation = Callable[[Fraction, Fraction], bool]

DEFAULT_CHECK_BUDGET = 250_000


def EQ(a: Fraction, b: Fraction) -> bool:
    return a == b


def LE(a: Fraction, b: Fraction) -> bool:
    return a <= b


def GE(a: Fraction, b: Fraction) -> bool:
    return a >= b


SYMBOLS = {EQ: "=", LE: "<=", GE: ">="}


@dataclass
class Witness:
    """A replayable counterexample: quantified inputs and both sides at one outcome."""

    S: Optional[StoppingTime] = None
    tau: Optional[StoppingTime] = None
    theta: Optional[StoppingTime] = None
    alpha: Optional[str] = None
    event: Optional[frozenset] = None
    block: Optional[frozenset] = None
    t: Optional[int] = None
    outcome: Optional[int] = None
    lhs: Optional[Fraction] = None
    rhs: Optional[Fraction] = None
    relation: Optional[str] = None
    note: str = ""
    extra: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self, instance: Instance) -> Dict[str, Any]:
        space = instance.space
        result: Dict[str, Any] = {}
        for name in ("S", "tau", "theta"):
            value = getattr(self, name)
            if value is not None:
                result[name] = value.as_map(space)
        if self.alpha is not None:
            result["alpha"] = self.alpha
        for name in ("event", "block"):
            value = getattr(self, name)
            if value is not None:
                result[name] = space.ids(value)
        if self.t is not None:
            result["t"] = self.t
        if self.outcome is not None:
            result["outcome"] = space.outcomes[self.outcome]
        if self.lhs is not None:
            result["lhs"] = format_rational(self.lhs)
        if self.rhs is not None:
            result["rhs"] = format_rational(self.rhs)
        if self.relation:
            result["relation"] = self.relation
        if self.note:
            result["note"] = self.note
        result.update(self.extra)
        return result


class SuiteContext:
    """Quantifier sets, oracle cache and budget for property checks on one instance.

    Quantifier sets are exhaustive: every predictable start time, every time
    above it, every pair and every event known before S. Each element drawn
    costs one tick of the check budget. `sample_limit` opts into a seeded
    subset of at most that many elements per set; a property that drew from
    a truncated set is marked partial.
    """

    def __init__(
        self,
        instance: Instance,
        budget: int = DEFAULT_BUDGET,
        check_budget: int = DEFAULT_CHECK_BUDGET,
        values: Optional[ValueSystem] = None,
        sample_limit: Optional[int] = None,
    ):
        if sample_limit is not None and sample_limit < 1:
            raise BadRequestError(
                detail="sample limit must be a positive integer",
                context={"sample_limit": sample_limit},
            )
        self.instance = instance
        self.space = instance.space
        self.filt = instance.filtration
        self.family = instance.reward
        if values is None:
            values = value_backward(instance.reward, instance.filtration)
        self.vs = values
        self.budget = budget
        self.check_budget = check_budget
        self.sample_limit = sample_limit
        self.ticks = 0
        self.partial = False
        self.rng = np.random.default_rng(0)
        self._above: Dict[Tuple[StoppingTime, bool], Tuple[StoppingTime, ...]] = {}
        self._oracle: Dict[Tuple[StoppingTime, bool], RandomVar] = {}
        self._decomposition: Optional[MertensDecomposition] = None

    def reset(self, property_id: str) -> None:
        self.ticks = 0
        self.partial = False
        key = f"{self.instance.digest}:{property_id}".encode("utf-8")
        seed = hashlib.sha256(key).hexdigest()
        self.rng = np.random.default_rng(int(seed[:16], 16))

    def tick(self, n: int = 1) -> None:
        self.ticks += n
        if self.ticks > self.check_budget:
            raise BudgetExceededError(
                detail=f"check budget of {self.check_budget} evaluations exhausted",
                context={"check_budget": self.check_budget},
            )

    # -- quantifier sets ---------------------------------------------------

    @property
    def horizon(self) -> int:
        return self.filt.horizon

    def constant(self, t: int) -> StoppingTime:
        return StoppingTime.constant(len(self.space), t)

    @cached_property
    def constants(self) -> Tuple[StoppingTime, ...]:
        return tuple(self.constant(t) for t in self.filt.times)

    @cached_property
    def all_predictable(self) -> Tuple[StoppingTime, ...]:
        return self.above(self.constant(0))

    def above(self, S: StoppingTime, strict: bool = False) -> Tuple[StoppingTime, ...]:
        key = (S, strict)
        if key not in self._above:
            self._above[key] = enumerate_predictable(self.filt, S, strict, self.budget)
        return self._above[key]

    def _restrict(self, items: Sequence[T], limit: Optional[int]) -> List[T]:
        if limit is None or len(items) <= limit:
            return list(items)
        self.partial = True
        picked = self.rng.choice(len(items), size=limit, replace=False)
        return [items[i] for i in sorted(int(i) for i in picked)]

    def _charged(self, items: Iterable[T]) -> Iterator[T]:
        for item in items:
            self.tick()
            yield item

    def sample(self, items: Sequence[T]) -> Iterator[T]:
        """Every item, or a seeded subset in order when a sample limit is set."""
        return self._charged(self._restrict(items, self.sample_limit))

    def starts(self) -> Iterator[StoppingTime]:
        """Start times S: every constant, then the other predictable times."""
        others = [S for S in self.all_predictable if not S.is_constant()]
        limit = self.sample_limit
        if limit is not None:
            limit = max(0, limit - len(self.constants))
        return self._charged([*self.constants, *self._restrict(others, limit)])

    def sample_times(self) -> List[StoppingTime]:
        return list(self.starts())

    def pairs(
        self,
        items: Sequence[StoppingTime],
        ordered: bool = False,
    ) -> Iterator[Tuple[StoppingTime, StoppingTime]]:
        """Pairs of distinct items (with first <= second pointwise when ordered)."""
        candidates = []
        for first, second in combinations(items, 2):
            if not ordered:
                candidates.append((first, second))
            elif second.dominates(first):
                candidates.append((first, second))
            elif first.dominates(second):
                candidates.append((second, first))
        return self.sample(candidates)

    def alpha_factors(self, S: StoppingTime) -> List[Tuple[str, RandomVar]]:
        """Constant levels plus two-valued factors measurable before S."""
        n = len(self.space)
        factors = [(format_rational(a), RandomVar.constant(n, a)) for a in ALPHA_LEVELS]
        blocks = pre_sigma(S, self.filt).blocks
        if len(blocks) > 1:
            levels = ((Fraction(1), Fraction(0)), (Fraction(3, 4), Fraction(1, 4)))
            for block in blocks:
                ids = ", ".join(self.space.ids(block))
                for high, low in levels:
                    alpha = RandomVar.indicator(n, block) * (high - low) + low
                    label = (
                        f"{format_rational(high)} on {{{ids}}}, "
                        f"{format_rational(low)} elsewhere"
                    )
                    factors.append((label, alpha))
        return factors

    def events(self, S: StoppingTime) -> List[frozenset]:
        """Every event known before S: all unions of its atoms."""
        blocks = pre_sigma(S, self.filt).blocks
        found = []
        for mask in range(1 << len(blocks)):
            chosen = (b for k, b in enumerate(blocks) if mask >> k & 1)
            found.append(frozenset().union(*chosen))
        return found

    # -- cached computations -----------------------------------------------

    def oracle(self, S: StoppingTime, strict: bool = False) -> RandomVar:
        key = (S, strict)
        if key not in self._oracle:
            self.tick(len(self.above(S, strict)))
            self._oracle[key] = value_bruteforce(
                self.family, self.filt, S, strict, self.budget
            )
        return self._oracle[key]

    @property
    def decomposition(self) -> MertensDecomposition:
        if self._decomposition is None:
            self._decomposition = decompose(self.vs)
        return self._decomposition

    # -- comparison --------------------------------------------------------

    def expect(
        self,
        lhs: RandomVar,
        rhs: RandomVar,
        relation: Relation = EQ,
        on: Optional[frozenset] = None,
        partition: Optional[Partition] = None,
        **where: Any,
    ) -> Optional[Witness]:
        """None when relation(lhs, rhs) holds pointwise (on `on`), else a witness."""
        self.tick()
        w = lhs.first_violation(rhs, relation, on)
        if w is None:
            return None
        witness = Witness(
            outcome=w,
            lhs=lhs[w],
            rhs=rhs[w],
            relation=SYMBOLS.get(relation),
            block=partition.block_of(w) if partition is not None else None,
            **where,
        )
        if witness.t is None and witness.S is not None:
            witness.t = witness.S[w]
        return witness
