"""
Solve Report Service

Builds the solve report of an instance from a start time S:
- value V, strict value V+, classical (post-partition) value, reward
- value at S and the optimal expected reward over predictable tau >= S
- first contact time, penalized times for the fixed alpha levels, stationarity threshold
- optimal times, the martingale-interval set and its maximum
"""

import logging
from typing import Any, Dict, Optional

import pandas as pd

from src.core.rationals import format_rational
from src.engine.optimal_stop import ALPHA_LEVELS, OptimalReport, optimal_report
from src.engine.snell import ValueSystem, classical_value_backward, value_backward
from src.engine.stopping_times import DEFAULT_BUDGET, StoppingTime
from src.models.instance import Instance
from src.services.reports.tables import per_time_dict, series_frame, to_csv, to_table

logger = logging.getLogger(__name__)

SERIES = ("V", "V+", "classical", "phi")


class SolveService:
    """Service for value-function reports."""

    def __init__(self, instance: Instance, budget: int = DEFAULT_BUDGET):
        self.instance = instance
        self.budget = budget
        self._values: Optional[ValueSystem] = None

    @property
    def values(self) -> ValueSystem:
        if self._values is None:
            instance = self.instance
            self._values = value_backward(instance.reward, instance.filtration)
        return self._values

    def start_time(self, at: Optional[StoppingTime]) -> StoppingTime:
        if at is not None:
            return at
        return StoppingTime.constant(len(self.instance.space), 0)

    def value_table(self) -> pd.DataFrame:
        vs = self.values
        instance = self.instance
        classical = classical_value_backward(instance.reward, instance.filtration)
        series = {
            "V": vs.v,
            "V+": vs.v_plus,
            "classical": classical,
            "phi": instance.reward.per_time,
        }
        return series_frame(series, instance.space)

    def optimal(self, at: Optional[StoppingTime] = None) -> OptimalReport:
        start = self.start_time(at)
        return optimal_report(self.values, start, ALPHA_LEVELS, self.budget)

    def generate_report(self, at: Optional[StoppingTime] = None) -> Dict[str, Any]:
        instance = self.instance
        space = instance.space
        vs = self.values
        report = self.optimal(at)
        classical = classical_value_backward(instance.reward, instance.filtration)
        logger.info(
            "Solved %s: optimal value %s from %s",
            instance.name or instance.digest[:12],
            format_rational(report.optimal_value),
            report.s.describe(space),
        )
        return {
            "instance": instance.name,
            "digest": instance.digest,
            "horizon": instance.horizon,
            "outcomes": list(space.outcomes),
            "at": report.s.as_map(space),
            "value": per_time_dict(vs.v, space),
            "value_plus": per_time_dict(vs.v_plus, space),
            "classical_value": per_time_dict(classical, space),
            "value_at_s": report.value_at_s.as_strings(space),
            "optimal_value": format_rational(report.optimal_value),
            "classical_optimal_value": format_rational(
                space.expectation(classical[0])
            ),
            "tau_hat": report.tau_hat.as_map(space),
            "tau_alpha": {
                format_rational(a): tau.as_map(space)
                for a, tau in report.tau_alpha.items()
            },
            "alpha_star": format_rational(report.alpha_star),
            "optimal_times": [tau.as_map(space) for tau in report.attained_by],
            "martingale_interval_set": [
                tau.as_map(space) for tau in report.optimal_set
            ],
            "tau_tilde": report.tau_tilde.as_map(space),
            "criterion": report.criterion.to_dict(),
            "representation": report.representation.to_dict(),
            "qlc_failures": instance.filtration.qlc_failures(),
        }

    def render_table(self, at: Optional[StoppingTime] = None) -> str:
        report = self.optimal(at)
        space = self.instance.space
        summary = pd.DataFrame(
            {
                "S": report.s.time,
                "V(S)": [format_rational(v) for v in report.value_at_s.values],
                "tau_hat": report.tau_hat.time,
                "tau_tilde": report.tau_tilde.time,
            },
            index=pd.Index(space.outcomes, name="outcome"),
        )
        return (
            to_table(self.value_table())
            + "\n"
            + summary.to_string()
            + "\n\n"
            + f"optimal value: {format_rational(report.optimal_value)}\n"
            + f"optimal times: {len(report.attained_by)}\n"
        )

    def render_csv(self, series: str = "V") -> str:
        return to_csv(self.value_table(), series)
