"""JSON document schema for instances.

Rationals travel as strings ("p/q" or "n"); blocks are lists of outcome ids.
Field order here is the canonical order used when saving.
"""

from typing import Annotated, Dict, List, Optional

from pydantic import AfterValidator, BaseModel, ConfigDict, Field

from src.core.rationals import parse_rational


def _rational(value: str) -> str:
    parse_rational(value)
    return value


RationalStr = Annotated[str, AfterValidator(_rational)]


class OutcomeDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")

    id: str = Field(..., min_length=1, description="Outcome identifier")
    prob: RationalStr = Field(
        ..., description="Probability as a rational string, e.g. '1/2'"
    )


class FiltrationSlotDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")

    t: int = Field(..., ge=0)
    pre: List[List[str]] = Field(
        ..., description="Blocks of the pre-partition (information before t)"
    )
    post: List[List[str]] = Field(
        ..., description="Blocks of the post-partition (information at t)"
    )


class RewardSlotDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")

    t: int = Field(..., ge=0)
    values: Dict[str, RationalStr] = Field(
        ..., description="Reward per outcome id as rational strings"
    )


class InstanceDoc(BaseModel):
    model_config = ConfigDict(
        extra="forbid",
        json_schema_extra={
            "example": {
                "name": "E1",
                "horizon": 2,
                "outcomes": [{"id": "omega", "prob": "1"}],
                "filtration": [
                    {"t": 0, "pre": [["omega"]], "post": [["omega"]]},
                    {"t": 1, "pre": [["omega"]], "post": [["omega"]]},
                    {"t": 2, "pre": [["omega"]], "post": [["omega"]]},
                ],
                "reward": [
                    {"t": 0, "values": {"omega": "1"}},
                    {"t": 1, "values": {"omega": "3"}},
                    {"t": 2, "values": {"omega": "2"}},
                ],
            }
        },
    )

    name: Optional[str] = None
    horizon: int = Field(..., ge=0)
    outcomes: List[OutcomeDoc] = Field(..., min_length=1)
    filtration: List[FiltrationSlotDoc]
    reward: List[RewardSlotDoc]
