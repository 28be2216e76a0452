# FastAPI dependencies shared by the v1 routes
from typing import Optional

from fastapi import Query

from src.core.config import settings


def get_budget(
    budget: Optional[int] = Query(
        None,
        ge=1,
        description="Enumeration cap on predictable times (default from SNELL_BUDGET)",
    ),
) -> int:
    return budget if budget is not None else settings.BUDGET


def get_check_budget() -> int:
    return settings.CHECK_BUDGET
