"""Instance bundle: sample space, two-slot filtration and reward family."""

import hashlib
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

from src.core.rationals import format_rational
from src.core.shared.exceptions import ValidationError
from src.engine.checks import CheckReport
from src.engine.filtered_space import SampleSpace, TwoSlotFiltration, validate_space
from src.engine.reward import RewardFamily, validate_admissible


@dataclass(frozen=True)
class Instance:
    space: SampleSpace
    filtration: TwoSlotFiltration
    reward: RewardFamily
    name: Optional[str] = field(default=None, compare=False)

    @property
    def horizon(self) -> int:
        return self.filtration.horizon

    @cached_property
    def digest(self) -> str:
        """sha256 over a canonical text rendering; independent of the name."""
        space = self.space
        lines = [f"horizon {self.horizon}"]
        for o, p in zip(space.outcomes, space.prob):
            lines.append(f"outcome {o} {format_rational(p)}")
        filt = self.filtration
        for t in filt.times:
            for slot, partition in (("pre", filt.pre[t]), ("post", filt.post[t])):
                blocks = sorted(",".join(space.ids(b)) for b in partition.blocks)
                lines.append(f"{slot} {t} " + "|".join(blocks))
        for t, phi in enumerate(self.reward.per_time):
            rendered = " ".join(format_rational(v) for v in phi.values)
            lines.append(f"reward {t} {rendered}")
        return hashlib.sha256("\n".join(lines).encode("utf-8")).hexdigest()

    def validate(self) -> CheckReport:
        """Space and filtration invariants, then reward admissibility."""
        report = validate_space(self.space, self.filtration)
        if report.ok:
            admissible = validate_admissible(self.reward, self.filtration)
            report.findings.extend(admissible.findings)
        report.name = "validate_instance"
        return report

    def ensure_valid(self) -> "Instance":
        report = self.validate()
        if not report.ok:
            first = report.first()
            raise ValidationError(
                detail=first.message,
                context={
                    "check": report.name,
                    "violations": [f.to_dict() for f in report.findings],
                },
            )
        return self
