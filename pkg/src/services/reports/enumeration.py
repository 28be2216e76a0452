"""Enumeration Report Service: predictable stopping times above S, with E[phi(tau)]."""

import logging
from typing import Any, Dict, List

import pandas as pd

from src.core.rationals import format_rational
from src.engine.snell import expected_reward
from src.engine.stopping_times import (
    DEFAULT_BUDGET,
    StoppingTime,
    enumerate_predictable,
)
from src.models.instance import Instance

logger = logging.getLogger(__name__)


class EnumerationService:
    def __init__(self, instance: Instance, budget: int = DEFAULT_BUDGET):
        self.instance = instance
        self.budget = budget

    def rows(self, start: StoppingTime, strict: bool = False) -> List[Dict[str, Any]]:
        instance = self.instance
        filt = instance.filtration
        times = enumerate_predictable(filt, start, strict, self.budget)
        logger.info("Enumerated %d predictable times (strict=%s)", len(times), strict)
        rows = []
        for tau in times:
            expected = expected_reward(instance.reward, filt, tau)
            rows.append(
                {
                    "tau": tau.as_map(instance.space),
                    "expected": format_rational(expected),
                }
            )
        return rows

    def generate_report(
        self, start: StoppingTime, strict: bool = False
    ) -> Dict[str, Any]:
        rows = self.rows(start, strict)
        return {
            "instance": self.instance.name,
            "digest": self.instance.digest,
            "from": start.as_map(self.instance.space),
            "strict": strict,
            "count": len(rows),
            "times": rows,
        }

    def table(self, start: StoppingTime, strict: bool = False) -> pd.DataFrame:
        outcomes = list(self.instance.space.outcomes)
        records = [
            {**row["tau"], "E[phi(tau)]": row["expected"]}
            for row in self.rows(start, strict)
        ]
        return pd.DataFrame(records, columns=outcomes + ["E[phi(tau)]"])

    def render_table(self, start: StoppingTime, strict: bool = False) -> str:
        return self.table(start, strict).to_string() + "\n"

    def render_csv(self, start: StoppingTime, strict: bool = False) -> str:
        return self.table(start, strict).to_csv(index=False, lineterminator="\n")
