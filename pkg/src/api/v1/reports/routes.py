"""Report endpoints: value system, property suite, decomposition and enumeration."""

from fastapi import APIRouter, Depends

from src.api.v1.schemas.reports import (
    DecomposeRequest,
    DecompositionReportResponse,
    EnumerateRequest,
    EnumerationReportResponse,
    PropertyReportResponse,
    SolveReportResponse,
    SolveRequest,
    VerifyRequest,
)
from src.core.dependencies import get_budget, get_check_budget
from src.engine.stopping_times import StoppingTime
from src.services.instances import from_doc, parse_stopping_time
from src.services.propcheck import run_suite
from src.services.reports.decomposition import DecompositionService
from src.services.reports.enumeration import EnumerationService
from src.services.reports.solve import SolveService

router = APIRouter(prefix='/api/v1', tags=['Reports'])


@router.post('/solve', response_model=SolveReportResponse)
def solve(request: SolveRequest, budget: int = Depends(get_budget)):
    """
    Solve the predictable optimal stopping problem of an instance.

    Returns the value V and strict value V+ per time, the classical
    (post-partition) value for comparison, the first contact time tau_hat(S),
    the penalized times tau_alpha(S), the optimal expected reward and every
    optimal time above S.

    **Start time**: `at` is a constant (e.g. `0`) or a map such as `{"u": 1, "d": 2}`;
    it must be predictable.
    """
    instance = from_doc(request.instance)
    at = parse_stopping_time(request.at, instance) if request.at is not None else None
    return SolveService(instance, budget).generate_report(at)


@router.post('/verify', response_model=PropertyReportResponse)
def verify(
    request: VerifyRequest,
    budget: int = Depends(get_budget),
    check_budget: int = Depends(get_check_budget),
):
    """
    Run the property suite on an instance.

    Each property reports `pass`, `fail` (with a replayable witness),
    `skipped-budget` or `not-modeled`. A failing property is reported in the
    body; the request itself still succeeds.
    """
    instance = from_doc(request.instance)
    report = run_suite(
        instance,
        budget=request.budget or budget,
        check_budget=request.check_budget or check_budget,
        props=request.props,
        sample_limit=request.sample_limit,
    )
    return report.to_dict()


@router.post('/decompose', response_model=DecompositionReportResponse)
def decompose(request: DecomposeRequest):
    """M, A and C of the value system, with the compensator flatness checks."""
    instance = from_doc(request.instance)
    at = parse_stopping_time(request.at, instance) if request.at is not None else None
    return DecompositionService(instance).generate_report(at)


@router.post(
    '/enumerate',
    response_model=EnumerationReportResponse,
    response_model_by_alias=True,
)
def enumerate_times(request: EnumerateRequest, budget: int = Depends(get_budget)):
    """Every predictable stopping time above `from` (strictly when `strict`),
    with E[phi(tau)]."""
    instance = from_doc(request.instance)
    start = (
        parse_stopping_time(request.from_, instance)
        if request.from_ is not None
        else StoppingTime.constant(len(instance.space), 0)
    )
    return EnumerationService(instance, budget).generate_report(start, request.strict)
