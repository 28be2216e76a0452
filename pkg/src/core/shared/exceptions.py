# Core exceptions - Global exceptions used across engine, services, CLI and API
from typing import Any, Dict, Optional


class AppBaseException(Exception):
    """Base class for all application exception
    with structured error handling."""

    status_code: int = 500
    exit_code: int = 1
    detail: str = "An unexpected error occurred"
    error_code: Optional[str] = None
    context: Optional[Dict[str, Any]] = None

    def __init__(
        self,
        detail: Optional[str] = None,
        error_code: Optional[str] = None,
        context: Optional[Dict[str, Any]] = None
    ):
        if detail:
            self.detail = detail
        if error_code:
            self.error_code = error_code
        if context:
            self.context = context
        super().__init__(self.detail)

    def to_dict(self) -> Dict[str, Any]:
        """Convert exception to dictionary for API responses and CLI diagnostics."""
        result: Dict[str, Any] = {
            "error": True,
            "status_code": self.status_code,
            "detail": self.detail,
        }
        if self.error_code:
            result["error_code"] = self.error_code
        if self.context:
            result["context"] = self.context
        return result


class BadRequestError(AppBaseException):
    """400 - Bad request exception."""
    status_code: int = 400
    exit_code: int = 2
    detail: str = "Invalid request"


class NotFoundError(AppBaseException):
    """404 - Resource not found exception."""
    status_code: int = 404
    exit_code: int = 2
    detail: str = "Resource not found"


class ValidationError(AppBaseException):
    """422 - Validation error exception."""
    status_code: int = 422
    exit_code: int = 2
    detail: str = "Validation failed"
    error_code: Optional[str] = "VALIDATION_ERROR"


class SchemaError(ValidationError):
    """422 - Instance document does not follow the schema."""
    detail: str = "Schema violation"
    error_code: Optional[str] = "SCHEMA_ERROR"

    def __init__(self, pointer: str, detail: Optional[str] = None, **kwargs: Any):
        self.pointer = pointer
        context = {"pointer": pointer, **(kwargs.pop("context", None) or {})}
        super().__init__(
            detail=f"schema error at {pointer}: {detail or self.detail}",
            context=context,
            **kwargs,
        )


class NotPredictableError(ValidationError):
    """422 - A stopping time is not predictable for the filtration."""
    detail: str = "Stopping time is not predictable"
    error_code: Optional[str] = "NOT_PREDICTABLE"


class NotMeasurableError(ValidationError):
    """422 - A random variable or event is not measurable for the required partition."""
    detail: str = "Random variable is not measurable"
    error_code: Optional[str] = "NOT_MEASURABLE"


class BudgetExceededError(AppBaseException):
    """413 - An enumeration or quantifier budget was exceeded."""
    status_code: int = 413
    exit_code: int = 3
    detail: str = "Enumeration budget exceeded"
    error_code: Optional[str] = "BUDGET_EXCEEDED"


class InternalServerError(AppBaseException):
    """500 - Internal server error exception."""
    status_code: int = 500
    exit_code: int = 1
    detail: str = "Internal server error"


class EngineInvariantError(InternalServerError):
    """500 - An identity the engine guarantees did not hold (engine bug)."""
    detail: str = "Engine invariant violated"
    error_code: Optional[str] = "ENGINE_INVARIANT"
