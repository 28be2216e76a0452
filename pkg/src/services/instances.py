"""
Instance Service

Loading, saving and building instances:
- load / save / dumps: JSON documents with exact rational strings
- canonical: the three fixture instances (E1 deterministic, E2 preslot-coin, E3 gap)
- generate_random: seeded random instances that always validate
- parse_stopping_time: constant or outcome -> time map, checked for predictability
"""

import json
import logging
import os
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Sequence, Union

import numpy as np
from pydantic import ValidationError as PydanticValidationError

from src.core.rationals import format_rational, parse_rational
from src.core.shared.exceptions import (
    EngineInvariantError,
    NotFoundError,
    SchemaError,
    ValidationError,
)
from src.engine.filtered_space import (
    Partition,
    RandomVar,
    SampleSpace,
    TwoSlotFiltration,
)
from src.engine.reward import RewardFamily
from src.engine.stopping_times import StoppingTime, require_predictable
from src.models.documents import (
    FiltrationSlotDoc,
    InstanceDoc,
    OutcomeDoc,
    RewardSlotDoc,
)
from src.models.instance import Instance

logger = logging.getLogger(__name__)

CANONICAL_ALIASES = {
    "E1": "E1",
    "DETERMINISTIC": "E1",
    "E2": "E2",
    "PRESLOT-COIN": "E2",
    "E3": "E3",
    "GAP": "E3",
}


def pointer(*parts: Any) -> str:
    """JSON pointer for a location inside a document."""
    return "".join(f"/{str(p).replace('~', '~0').replace('/', '~1')}" for p in parts)


# ---------------------------------------------------------------------------
# Documents
# ---------------------------------------------------------------------------

def parse_document(data: Any) -> InstanceDoc:
    """Validate raw JSON data against the schema.

    Raises:
        SchemaError: with the JSON pointer of the first offending field
    """
    try:
        return InstanceDoc.model_validate(data)
    except PydanticValidationError as e:
        errors = e.errors()
        first = errors[0]
        message = first["msg"].removeprefix("Value error, ")
        raise SchemaError(
            pointer(*first["loc"]),
            message,
            context={
                "errors": [
                    {"pointer": pointer(*err["loc"]), "message": err["msg"]}
                    for err in errors
                ]
            },
        ) from None


def _blocks(
    doc_blocks: List[List[str]], positions: Dict[str, int], *where: Any
) -> Partition:
    blocks = []
    for b, block in enumerate(doc_blocks):
        members: List[int] = []
        for i, outcome in enumerate(block):
            if outcome not in positions:
                raise SchemaError(pointer(*where, b, i), f"unknown outcome {outcome!r}")
            if positions[outcome] in members:
                raise SchemaError(
                    pointer(*where, b, i), f"outcome {outcome!r} repeated in one block"
                )
            members.append(positions[outcome])
        blocks.append(members)
    return Partition.of(blocks)


def from_doc(doc: InstanceDoc) -> Instance:
    """Build and validate an instance from a parsed document.

    Raises:
        SchemaError: when the document refers to unknown outcomes or misses slots
        ValidationError: when a space, filtration or reward invariant is violated
    """
    positions: Dict[str, int] = {}
    for k, outcome in enumerate(doc.outcomes):
        if outcome.id in positions:
            raise SchemaError(
                pointer("outcomes", k, "id"), f"duplicate outcome id {outcome.id!r}"
            )
        positions[outcome.id] = k
    space = SampleSpace(
        tuple(o.id for o in doc.outcomes),
        tuple(parse_rational(o.prob) for o in doc.outcomes),
    )

    expected = doc.horizon + 1
    if len(doc.filtration) != expected:
        raise SchemaError(
            pointer("filtration"),
            f"expected {expected} slots, got {len(doc.filtration)}",
        )
    if len(doc.reward) != expected:
        raise SchemaError(
            pointer("reward"), f"expected {expected} slots, got {len(doc.reward)}"
        )

    pre, post = [], []
    for k, slot in enumerate(doc.filtration):
        if slot.t != k:
            raise SchemaError(
                pointer("filtration", k, "t"), f"expected t={k}, got t={slot.t}"
            )
        pre.append(_blocks(slot.pre, positions, "filtration", k, "pre"))
        post.append(_blocks(slot.post, positions, "filtration", k, "post"))
    filtration = TwoSlotFiltration(space, doc.horizon, tuple(pre), tuple(post))

    per_time = []
    for k, slot in enumerate(doc.reward):
        if slot.t != k:
            raise SchemaError(
                pointer("reward", k, "t"), f"expected t={k}, got t={slot.t}"
            )
        for outcome in slot.values:
            if outcome not in positions:
                raise SchemaError(
                    pointer("reward", k, "values", outcome),
                    f"unknown outcome {outcome!r}",
                )
        missing = [o for o in space.outcomes if o not in slot.values]
        if missing:
            raise SchemaError(
                pointer("reward", k, "values"), f"missing value for {missing[0]!r}"
            )
        values = tuple(parse_rational(slot.values[o]) for o in space.outcomes)
        per_time.append(RandomVar(values))

    instance = Instance(space, filtration, RewardFamily(tuple(per_time)), name=doc.name)
    return instance.ensure_valid()


def to_doc(instance: Instance) -> InstanceDoc:
    space = instance.space
    filt = instance.filtration
    return InstanceDoc(
        name=instance.name,
        horizon=instance.horizon,
        outcomes=[
            OutcomeDoc(id=o, prob=format_rational(p))
            for o, p in zip(space.outcomes, space.prob)
        ],
        filtration=[
            FiltrationSlotDoc(
                t=t,
                pre=[space.ids(block) for block in filt.pre[t].blocks],
                post=[space.ids(block) for block in filt.post[t].blocks],
            )
            for t in filt.times
        ],
        reward=[
            RewardSlotDoc(t=t, values=phi.as_strings(space))
            for t, phi in enumerate(instance.reward.per_time)
        ],
    )


def dumps(instance: Instance) -> str:
    """Canonical JSON text of an instance (stable key order, trailing newline)."""
    data = to_doc(instance).model_dump(mode="json", exclude_none=True)
    return json.dumps(data, indent=2) + "\n"


def loads(text: str) -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(
            "", f"invalid JSON: {e.msg} (line {e.lineno}, column {e.colno})"
        ) from None
    return from_doc(parse_document(data))


def load(path: Union[str, Path]) -> Instance:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise NotFoundError(
            detail=f"instance file not found: {path}", context={"path": str(path)}
        ) from None
    instance = loads(text)
    logger.info("Loaded instance %s (%s)", path.name, instance.digest[:12])
    return instance


def write_atomic(path: Union[str, Path], text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save(instance: Instance, path: Union[str, Path]) -> None:
    write_atomic(path, dumps(instance))
    logger.info("Saved instance %s (%s)", Path(path).name, instance.digest[:12])


# ---------------------------------------------------------------------------
# Canonical fixtures
# ---------------------------------------------------------------------------

def _build(
    name: str,
    outcomes: Sequence[str],
    prob: Sequence[Fraction],
    pre: Sequence[Sequence[Sequence[int]]],
    post: Sequence[Sequence[Sequence[int]]],
    reward: Sequence[Sequence[Fraction | int]],
) -> Instance:
    space = SampleSpace(tuple(outcomes), tuple(Fraction(p) for p in prob))
    filtration = TwoSlotFiltration(
        space,
        len(reward) - 1,
        tuple(Partition.of(blocks) for blocks in pre),
        tuple(Partition.of(blocks) for blocks in post),
    )
    family = RewardFamily(tuple(RandomVar.of(values) for values in reward))
    return Instance(space, filtration, family, name=name).ensure_valid()


def canonical(name: str) -> Instance:
    """E1 "deterministic", E2 "preslot-coin" or E3 "gap".

    Raises:
        NotFoundError: for any other name
    """
    key = CANONICAL_ALIASES.get(name.strip().upper())
    half = Fraction(1, 2)
    trivial = [[0, 1]]
    split = [[0], [1]]
    if key == "E1":
        return _build("E1", ["omega"], [1], [[[0]]] * 3, [[[0]]] * 3, [[1], [3], [2]])
    if key == "E2":
        return _build(
            "E2", ["u", "d"], [half, half],
            pre=[trivial, split],
            post=[trivial, split],
            reward=[[1, 1], [2, 0]],
        )
    if key == "E3":
        return _build(
            "E3", ["u", "d"], [half, half],
            pre=[trivial, trivial, split],
            post=[trivial, split, split],
            reward=[[0, 0], [1, 1], [3, 0]],
        )
    raise NotFoundError(
        detail=f"unknown canonical instance {name!r}",
        context={"known": sorted(CANONICAL_ALIASES)},
    )


# ---------------------------------------------------------------------------
# Random generation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeneratorParams:
    max_outcomes: int = 4
    horizon: int = 2
    qlc_violation_prob: float = 0.5
    reward_max: int = 10

    def __post_init__(self) -> None:
        if self.max_outcomes < 1:
            raise ValidationError(detail="max_outcomes must be at least 1")
        if self.horizon < 0:
            raise ValidationError(detail="horizon must be nonnegative")
        if not 0 <= self.qlc_violation_prob <= 1:
            raise ValidationError(detail="qlc_violation_prob must lie in [0, 1]")
        if self.reward_max < 0:
            raise ValidationError(detail="reward_max must be nonnegative")


def _split(
    rng: np.random.Generator, blocks: Sequence[frozenset[int]]
) -> List[List[frozenset[int]]]:
    """Randomly split some blocks in two; returns the children of each block."""
    children = []
    for block in blocks:
        if len(block) > 1 and rng.random() < 0.5:
            members = [int(w) for w in rng.permutation(sorted(block))]
            cut = int(rng.integers(1, len(members)))
            children.append([frozenset(members[:cut]), frozenset(members[cut:])])
        else:
            children.append([block])
    return children


def generate_random(seed: int, params: GeneratorParams = GeneratorParams()) -> Instance:
    """Seeded random instance over a random refinement chain.

    Each post-partition randomly refines the previous one. With probability
    qlc_violation_prob the pre-partition re-merges one freshly split block, so
    that Q_t is strictly coarser than P_t; otherwise Q_t = P_t. Rewards are
    Q_t-measurable with denominators in {1, 2, 3, 4} and bounded by reward_max.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, params.max_outcomes + 1))
    weights = [int(x) for x in rng.integers(1, 10, size=n)]
    total = sum(weights)
    space = SampleSpace(
        tuple(f"w{i}" for i in range(n)),
        tuple(Fraction(x, total) for x in weights),
    )

    pre: List[Partition] = [Partition.trivial(n)]
    post: List[Partition] = []
    previous = list(pre[0].blocks)
    for t in range(params.horizon + 1):
        children = _split(rng, previous)
        fine = Partition.of(block for group in children for block in group)
        split_parents = [k for k, group in enumerate(children) if len(group) > 1]
        if t > 0:
            if split_parents and rng.random() < params.qlc_violation_prob:
                merged = split_parents[int(rng.integers(len(split_parents)))]
                coarse = [
                    block
                    for k, group in enumerate(children)
                    for block in ([previous[k]] if k == merged else group)
                ]
                pre.append(Partition.of(coarse))
            else:
                pre.append(fine)
        post.append(fine)
        previous = list(fine.blocks)

    per_time = []
    for t in range(params.horizon + 1):
        values = [Fraction(0)] * n
        for block in pre[t].blocks:
            denominator = int(rng.choice([1, 2, 3, 4]))
            numerator = int(rng.integers(0, params.reward_max * denominator + 1))
            value = Fraction(numerator, denominator)
            for w in block:
                values[w] = value
        per_time.append(RandomVar(tuple(values)))

    filtration = TwoSlotFiltration(space, params.horizon, tuple(pre), tuple(post))
    family = RewardFamily(tuple(per_time))
    instance = Instance(space, filtration, family, name=f"random-{seed}")
    report = instance.validate()
    if not report.ok:
        raise EngineInvariantError(
            detail=f"generated instance is invalid: {report.first().message}",
            context={"seed": seed, **report.to_dict()},
        )
    return instance


# ---------------------------------------------------------------------------
# Stopping times from user input
# ---------------------------------------------------------------------------

def parse_stopping_time(
    value: Union[int, str, Dict[str, Any]], instance: Instance
) -> StoppingTime:
    """A constant time, or a JSON map outcome id -> time; must be predictable."""
    space = instance.space
    if isinstance(value, str):
        text = value.strip()
        if text.startswith("{"):
            try:
                value = json.loads(text)
            except json.JSONDecodeError as e:
                raise ValidationError(
                    detail=f"invalid stopping-time map: {e.msg}"
                ) from None
        else:
            try:
                value = int(text)
            except ValueError:
                raise ValidationError(
                    detail=f"expected an integer time or a JSON map, got {value!r}"
                ) from None
    if isinstance(value, bool):
        raise ValidationError(detail="stopping time must be an integer or a map")
    if isinstance(value, int):
        tau = StoppingTime.constant(len(space), value)
    elif isinstance(value, dict):
        unknown = [o for o in value if o not in space.outcomes]
        if unknown:
            raise ValidationError(
                detail=f"unknown outcome {unknown[0]!r} in stopping time"
            )
        missing = [o for o in space.outcomes if o not in value]
        if missing:
            raise ValidationError(
                detail=f"stopping time has no entry for {missing[0]!r}"
            )
        entries = [value[o] for o in space.outcomes]
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in entries):
            raise ValidationError(detail="stopping-time entries must be integers")
        tau = StoppingTime(tuple(value[o] for o in space.outcomes))
    else:
        raise ValidationError(detail="stopping time must be an integer or a map")
    require_predictable(tau, instance.filtration)
    return tau
