"""
Decomposition Report Service

M, A, C tables of the value system with the compensator checks:
- reconstruction and martingality (asserted when decomposing)
- dC vanishes off the contact set
- no compensator growth before tau_alpha(S) and tau_hat(S)
"""

import logging
from typing import Any, Dict, Optional

import pandas as pd

from src.core.rationals import format_rational
from src.engine.decomposition import (
    MertensDecomposition,
    decompose,
    flat_before,
    flat_off_contact_check,
)
from src.engine.optimal_stop import ALPHA_LEVELS, tau_alpha, tau_hat
from src.engine.snell import value_backward
from src.engine.stopping_times import StoppingTime
from src.models.instance import Instance
from src.services.reports.tables import per_time_dict, series_frame, to_csv, to_table

logger = logging.getLogger(__name__)


class DecompositionService:
    """Service for Mertens decomposition reports."""

    def __init__(self, instance: Instance):
        self.instance = instance
        self._decomposition: Optional[MertensDecomposition] = None

    @property
    def decomposition(self) -> MertensDecomposition:
        if self._decomposition is None:
            vs = value_backward(self.instance.reward, self.instance.filtration)
            self._decomposition = decompose(vs)
        return self._decomposition

    def table(self) -> pd.DataFrame:
        d = self.decomposition
        jumps = [d.delta_c(t) for t in range(d.horizon + 1)]
        return series_frame(
            {"V": d.values.v, "M": d.m, "A": d.a, "C": d.c, "dC": jumps},
            self.instance.space,
            first_time={"C": -1},
        )

    def generate_report(self, at: Optional[StoppingTime] = None) -> Dict[str, Any]:
        instance = self.instance
        space = instance.space
        d = self.decomposition
        S = at if at is not None else StoppingTime.constant(len(space), 0)
        flat = {
            format_rational(a): flat_before(d, tau_alpha(d.values, S, a), S).to_dict()
            for a in ALPHA_LEVELS
        }
        flat["hat"] = flat_before(d, tau_hat(d.values, S), S).to_dict()
        off_contact = flat_off_contact_check(d)
        if not off_contact.ok:
            logger.warning(
                "Compensator grows off the contact set on %s",
                instance.name or instance.digest[:12],
            )
        return {
            "instance": instance.name,
            "digest": instance.digest,
            "horizon": instance.horizon,
            "outcomes": list(space.outcomes),
            "at": S.as_map(space),
            "m": per_time_dict(d.m, space),
            "a": per_time_dict(d.a, space),
            "c": per_time_dict(d.c, space, first_time=-1),
            "delta_c": per_time_dict(
                [d.delta_c(t) for t in range(d.horizon + 1)], space
            ),
            "contact": [
                {"t": t, "outcomes": space.ids(event)}
                for t, event in enumerate(d.contact)
            ],
            "flat_off_contact": off_contact.to_dict(),
            "flat_before": flat,
        }

    def render_table(self) -> str:
        return to_table(self.table())

    def render_csv(self, series: str = "M") -> str:
        return to_csv(self.table(), series)
