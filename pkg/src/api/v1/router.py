from fastapi import APIRouter, Path

from src.api.v1.schemas.instances import GenerateRequest
from src.models.documents import InstanceDoc
from src.services.instances import (
    CANONICAL_ALIASES,
    GeneratorParams,
    canonical,
    generate_random,
    to_doc,
)

router = APIRouter(prefix='/api/v1')


# Instance endpoints
@router.get(
    '/instances/canonical/{name}',
    response_model=InstanceDoc,
    response_model_exclude_none=True,
    tags=['Instances'],
)
async def get_canonical_instance(
    name: str = Path(
        ..., description="E1, E2 or E3 (or deterministic, preslot-coin, gap)"
    ),
):
    """
    Return one of the canonical instances as an instance document.

    - **E1** (deterministic): one outcome, rewards 1, 3, 2
    - **E2** (preslot-coin): a coin revealed at the pre-slot of t=1
    - **E3** (gap): a coin revealed at the post-slot of t=1; predictable value
      3/2, classical value 2
    """
    return to_doc(canonical(name))


@router.get('/instances/canonical', tags=['Instances'])
async def list_canonical_instances():
    """Known canonical names and their aliases."""
    names = sorted(set(CANONICAL_ALIASES.values()))
    return {"names": names, "aliases": CANONICAL_ALIASES}


@router.post(
    '/instances/generate',
    response_model=InstanceDoc,
    response_model_exclude_none=True,
    tags=['Instances'],
)
async def generate_instance(request: GenerateRequest):
    """
    Generate a random valid instance. Deterministic in the seed.

    With qlc_violation_prob=0 every pre-partition equals the post-partition of
    the same time (no information arrives in a post-slot).
    """
    params = GeneratorParams(
        max_outcomes=request.max_outcomes,
        horizon=request.horizon,
        qlc_violation_prob=request.qlc_violation_prob,
        reward_max=request.reward_max,
    )
    return to_doc(generate_random(request.seed, params))
