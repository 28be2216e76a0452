"""Schemas for instance generation."""

from pydantic import BaseModel, ConfigDict, Field


class GenerateRequest(BaseModel):
    model_config = ConfigDict(
        extra="forbid",
        json_schema_extra={
            "example": {
                "seed": 7,
                "max_outcomes": 4,
                "horizon": 2,
                "qlc_violation_prob": 0.5,
                "reward_max": 10,
            }
        },
    )

    seed: int = Field(
        ..., ge=0, description="Generator seed; equal seeds give identical instances"
    )
    max_outcomes: int = Field(
        4, ge=1, description="Upper bound on the number of outcomes"
    )
    horizon: int = Field(2, ge=0, description="Last grid time N")
    qlc_violation_prob: float = Field(
        0.5,
        ge=0,
        le=1,
        description=(
            "Probability that the pre-partition at t is strictly coarser "
            "than the post-partition"
        ),
    )
    reward_max: int = Field(10, ge=0, description="Upper bound on reward values")
