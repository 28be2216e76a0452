"""
Property Suite Runner

Runs registered properties against one instance and collects a
PropertyReport. Statuses:
- pass: no witness found on any quantified input; `partial` is set when a
  sample limit truncated one of the quantifier sets
- fail: a witness was found, or the engine raised an invariant error
- skipped-budget: the enumeration or the check budget ran out
- not-modeled: the statement has no counterpart on a finite grid
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional

from src.core.shared.exceptions import (
    AppBaseException,
    BudgetExceededError,
    NotFoundError,
)
from src.engine.snell import ValueSystem
from src.engine.stopping_times import DEFAULT_BUDGET
from src.models.instance import Instance
from src.services.propcheck.context import DEFAULT_CHECK_BUDGET, SuiteContext, Witness
from src.services.propcheck.registry import PROPERTIES, REGISTRY, PropertyDescriptor

logger = logging.getLogger(__name__)


class Status(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    SKIPPED_BUDGET = "skipped-budget"
    NOT_MODELED = "not-modeled"


@dataclass
class PropertyResult:
    id: str
    statement: str
    status: Status
    witness: Optional[Dict[str, Any]] = None
    detail: Optional[str] = None
    partial: bool = False

    def to_dict(self) -> Dict[str, Any]:
        result: Dict[str, Any] = {
            "id": self.id,
            "statement": self.statement,
            "status": self.status.value,
        }
        if self.witness is not None:
            result["witness"] = self.witness
        if self.detail:
            result["detail"] = self.detail
        if self.partial:
            result["partial"] = True
        return result


@dataclass
class PropertyReport:
    digest: str
    instance: Optional[str]
    results: List[PropertyResult] = field(default_factory=list)

    @property
    def failed(self) -> List[PropertyResult]:
        return [r for r in self.results if r.status is Status.FAIL]

    @property
    def skipped(self) -> List[PropertyResult]:
        return [r for r in self.results if r.status is Status.SKIPPED_BUDGET]

    @property
    def partial(self) -> List[PropertyResult]:
        return [r for r in self.results if r.partial]

    def counts(self) -> Dict[str, int]:
        counts = {status.value: 0 for status in Status}
        for r in self.results:
            counts[r.status.value] += 1
        return counts

    def to_dict(self) -> Dict[str, Any]:
        return {
            "instance": self.instance,
            "digest": self.digest,
            "summary": self.counts(),
            "properties": [r.to_dict() for r in self.results],
        }


def select(ids: Optional[Iterable[str]] = None) -> List[PropertyDescriptor]:
    """Descriptors in registry order, optionally restricted to the given ids."""
    if ids is None:
        return list(REGISTRY)
    wanted = list(dict.fromkeys(ids))
    unknown = [i for i in wanted if i not in PROPERTIES]
    if unknown:
        raise NotFoundError(
            detail=f"unknown property id(s): {', '.join(unknown)}",
            context={"unknown": unknown, "available": list(PROPERTIES)},
        )
    return [d for d in REGISTRY if d.id in wanted]


def run_property(
    context: SuiteContext, descriptor: PropertyDescriptor
) -> PropertyResult:
    if not descriptor.modeled:
        return PropertyResult(
            descriptor.id,
            descriptor.statement,
            Status.NOT_MODELED,
            detail=descriptor.quantifiers,
        )
    context.reset(descriptor.id)
    try:
        witness = descriptor.check(context)
    except BudgetExceededError as e:
        logger.warning("Property %s skipped: %s", descriptor.id, e.detail)
        return PropertyResult(
            descriptor.id,
            descriptor.statement,
            Status.SKIPPED_BUDGET,
            detail=e.detail,
        )
    except AppBaseException as e:
        # engine self-checks raise when an identity breaks
        extra = {"error": type(e).__name__, **(e.context or {})}
        witness = Witness(note=e.detail, extra=extra)
    if witness is None:
        detail = None
        if context.partial:
            limit = context.sample_limit
            detail = f"quantifier sets sampled to at most {limit} elements"
        return PropertyResult(
            descriptor.id,
            descriptor.statement,
            Status.PASS,
            detail=detail,
            partial=context.partial,
        )
    logger.warning(
        "Property %s failed on %s", descriptor.id, context.instance.digest[:12]
    )
    return PropertyResult(
        descriptor.id,
        descriptor.statement,
        Status.FAIL,
        witness=witness.to_dict(context.instance),
    )


def run_suite(
    instance: Instance,
    budget: int = DEFAULT_BUDGET,
    check_budget: int = DEFAULT_CHECK_BUDGET,
    props: Optional[Iterable[str]] = None,
    values: Optional[ValueSystem] = None,
    sample_limit: Optional[int] = None,
) -> PropertyReport:
    """Evaluate the selected properties (all by default) on one instance.

    Every predictable time within the enumeration budget is quantified;
    `sample_limit` opts into seeded subsets and marks the passing results
    that used them as partial. `values` replaces the computed value system,
    so a tampered system can be checked against the instance.
    """
    descriptors = select(props)
    context = SuiteContext(
        instance,
        budget=budget,
        check_budget=check_budget,
        values=values,
        sample_limit=sample_limit,
    )
    report = PropertyReport(digest=instance.digest, instance=instance.name)
    for descriptor in descriptors:
        report.results.append(run_property(context, descriptor))
    counts = report.counts()
    logger.info(
        "Suite on %s: %d pass, %d fail, %d skipped, %d not modeled",
        instance.name or instance.digest[:12],
        counts[Status.PASS.value],
        counts[Status.FAIL.value],
        counts[Status.SKIPPED_BUDGET.value],
        counts[Status.NOT_MODELED.value],
    )
    return report
