# Global exception handlers for the FastAPI application
import logging

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from .exceptions import AppBaseException

logger = logging.getLogger(__name__)


def _pointer(loc) -> str:
    """JSON pointer of a request-validation location, without the leading 'body'."""
    parts = [str(p) for p in loc]
    if parts and parts[0] == "body":
        parts = parts[1:]
    return "".join(f"/{p.replace('~', '~0').replace('/', '~1')}" for p in parts)


def setup_exception_handlers(app: FastAPI) -> None:
    """Setup global exception handlers for the FastAPI application."""

    @app.exception_handler(AppBaseException)
    async def app_exception_handler(
        request: Request, exc: AppBaseException
    ) -> JSONResponse:
        """Handle application exceptions; engine invariant failures log as errors."""
        log = logger.error if exc.status_code >= 500 else logger.warning
        log(
            f"Application exception: {exc.__class__.__name__} - {exc.detail}",
            extra={
                "path": str(request.url),
                "method": request.method,
                "error_code": exc.error_code,
            },
        )
        return JSONResponse(status_code=exc.status_code, content=exc.to_dict())

    @app.exception_handler(RequestValidationError)
    async def validation_exception_handler(
        request: Request, exc: RequestValidationError
    ) -> JSONResponse:
        """Handle request-body schema errors, pointing at the first location."""
        errors = exc.errors()
        logger.warning(
            f"Validation error: {len(errors)} problem(s)",
            extra={"path": str(request.url), "method": request.method},
        )
        first = errors[0] if errors else {"loc": (), "msg": "invalid request"}
        pointer = _pointer(first.get("loc", ()))
        return JSONResponse(
            status_code=422,
            content={
                "error": True,
                "status_code": 422,
                "detail": f"schema error at {pointer}: {first.get('msg')}",
                "error_code": "SCHEMA_ERROR",
                "context": {
                    "pointer": pointer,
                    "errors": [
                        {"pointer": _pointer(e.get("loc", ())), "message": e.get("msg")}
                        for e in errors
                    ],
                },
            },
        )

    @app.exception_handler(StarletteHTTPException)
    async def http_exception_handler(
        request: Request, exc: StarletteHTTPException
    ) -> JSONResponse:
        """Handle routing and HTTP exceptions."""
        logger.warning(
            f"HTTP exception: {exc.status_code} - {exc.detail}",
            extra={"path": str(request.url), "method": request.method},
        )
        return JSONResponse(
            status_code=exc.status_code,
            content={
                "error": True,
                "status_code": exc.status_code,
                "detail": exc.detail or "HTTP error",
            },
        )

    @app.exception_handler(Exception)
    async def global_exception_handler(
        request: Request, exc: Exception
    ) -> JSONResponse:
        """Handle unexpected exceptions."""
        logger.error(
            f"Unexpected error: {exc.__class__.__name__} - {str(exc)}",
            extra={"path": str(request.url), "method": request.method},
            exc_info=True,
        )
        return JSONResponse(
            status_code=500,
            content={
                "error": True,
                "status_code": 500,
                "detail": "Internal server error",
                "error_code": "INTERNAL_SERVER_ERROR",
            },
        )
