"""Request and response schemas for the solve, verify, decompose and enumerate
endpoints."""

from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

from src.models.documents import InstanceDoc

TimeSpec = Union[int, Dict[str, int]]

E3_EXAMPLE = {
    "name": "E3",
    "horizon": 2,
    "outcomes": [{"id": "u", "prob": "1/2"}, {"id": "d", "prob": "1/2"}],
    "filtration": [
        {"t": 0, "pre": [["u", "d"]], "post": [["u", "d"]]},
        {"t": 1, "pre": [["u", "d"]], "post": [["u"], ["d"]]},
        {"t": 2, "pre": [["u"], ["d"]], "post": [["u"], ["d"]]},
    ],
    "reward": [
        {"t": 0, "values": {"u": "0", "d": "0"}},
        {"t": 1, "values": {"u": "1", "d": "1"}},
        {"t": 2, "values": {"u": "3", "d": "0"}},
    ],
}


class SolveRequest(BaseModel):
    model_config = ConfigDict(
        extra="forbid",
        json_schema_extra={"example": {"instance": E3_EXAMPLE, "at": 0}},
    )

    instance: InstanceDoc
    at: Optional[TimeSpec] = Field(
        None,
        description="Start time S: a constant or a map outcome id -> time (default 0)",
    )


class VerifyRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    instance: InstanceDoc
    props: Optional[List[str]] = Field(
        None, description="Property ids to run (default: all)"
    )
    budget: Optional[int] = Field(
        None, ge=1, description="Enumeration cap on predictable times"
    )
    check_budget: Optional[int] = Field(
        None, ge=1, description="Cap on evaluations per property"
    )
    sample_limit: Optional[int] = Field(
        None,
        ge=1,
        description="Check seeded subsets of at most this many times (marked partial)",
    )


class DecomposeRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    instance: InstanceDoc
    at: Optional[TimeSpec] = Field(
        None, description="Start time S for the flat-before checks"
    )


class EnumerateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    instance: InstanceDoc
    from_: Optional[TimeSpec] = Field(
        None, alias="from", description="Lower bound S (default 0)"
    )
    strict: bool = Field(False, description="Enumerate the strict class above S")


class SolveReportResponse(BaseModel):
    """Values are exact rationals rendered as strings."""

    instance: Optional[str]
    digest: str
    horizon: int
    outcomes: List[str]
    at: Dict[str, int]
    value: List[Dict[str, Any]]
    value_plus: List[Dict[str, Any]]
    classical_value: List[Dict[str, Any]]
    value_at_s: Dict[str, str]
    optimal_value: str
    classical_optimal_value: str
    tau_hat: Dict[str, int]
    tau_alpha: Dict[str, Dict[str, int]]
    alpha_star: str
    optimal_times: List[Dict[str, int]]
    martingale_interval_set: List[Dict[str, int]]
    tau_tilde: Dict[str, int]
    criterion: Dict[str, Any]
    representation: Dict[str, Any]
    qlc_failures: List[int]


class PropertyReportResponse(BaseModel):
    instance: Optional[str]
    digest: str
    summary: Dict[str, int] = Field(..., description="Number of properties per status")
    properties: List[Dict[str, Any]] = Field(
        ..., description="id, statement, status and, on fail, a replayable witness"
    )


class DecompositionReportResponse(BaseModel):
    instance: Optional[str]
    digest: str
    horizon: int
    outcomes: List[str]
    at: Dict[str, int]
    m: List[Dict[str, Any]]
    a: List[Dict[str, Any]]
    c: List[Dict[str, Any]] = Field(
        ..., description="C_{t-1} for t = 0..N+1, starting at C_{-1} = 0"
    )
    delta_c: List[Dict[str, Any]]
    contact: List[Dict[str, Any]]
    flat_off_contact: Dict[str, Any]
    flat_before: Dict[str, Any]


class EnumerationReportResponse(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    instance: Optional[str]
    digest: str
    from_: Dict[str, int] = Field(..., alias="from")
    strict: bool
    count: int
    times: List[Dict[str, Any]]
