"""Table helpers shared by the report services.

Per-time random variables are laid out long (series, time, outcome, value)
with values as exact rational strings, and rendered either as CSV with the
header "time,outcome,value" or as a wide text table (one column per outcome).
"""

from typing import Dict, List, Mapping, Sequence

import pandas as pd

from src.core.rationals import format_rational
from src.core.shared.exceptions import BadRequestError
from src.engine.filtered_space import RandomVar, SampleSpace

LONG_COLUMNS = ["series", "time", "outcome", "value"]


def series_frame(
    series: Mapping[str, Sequence[RandomVar]],
    space: SampleSpace,
    first_time: Mapping[str, int] | None = None,
) -> pd.DataFrame:
    """Long table of several per-time series.

    `first_time` offsets a series (C starts at -1).
    """
    first_time = first_time or {}
    rows = [
        {
            "series": name,
            "time": first_time.get(name, 0) + k,
            "outcome": outcome,
            "value": format_rational(v),
        }
        for name, values in series.items()
        for k, x in enumerate(values)
        for outcome, v in zip(space.outcomes, x.values)
    ]
    frame = pd.DataFrame(rows, columns=LONG_COLUMNS)
    frame["series"] = pd.Categorical(
        frame["series"], categories=list(series), ordered=True
    )
    frame["outcome"] = pd.Categorical(
        frame["outcome"], categories=list(space.outcomes), ordered=True
    )
    return frame


def to_csv(frame: pd.DataFrame, series: str) -> str:
    """CSV of one series with the header time,outcome,value."""
    names = [str(s) for s in frame["series"].cat.categories]
    if series not in names:
        raise BadRequestError(
            detail=f"unknown series {series!r}",
            context={"available": names},
        )
    selected = frame[frame["series"] == series][["time", "outcome", "value"]]
    return selected.to_csv(index=False, lineterminator="\n")


def to_table(frame: pd.DataFrame) -> str:
    """Wide text table: rows (series, time), one column per outcome."""
    wide = frame.pivot(index=["series", "time"], columns="outcome", values="value")
    wide = wide.sort_index()
    wide.columns = [str(c) for c in wide.columns]
    wide.columns.name = None
    return wide.to_string() + "\n"


def per_time_dict(
    values: Sequence[RandomVar], space: SampleSpace, first_time: int = 0
) -> List[Dict[str, object]]:
    return [
        {"t": first_time + k, "values": x.as_strings(space)}
        for k, x in enumerate(values)
    ]
