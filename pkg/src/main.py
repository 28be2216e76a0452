import logging
from contextlib import asynccontextmanager

from dotenv import load_dotenv
from fastapi import FastAPI

from .core.config import settings
from .core.shared.exceptions_handler import setup_exception_handlers
from src.api.v1.router import router
from src.api.v1.reports.routes import router as reports_router

load_dotenv()

# Configure logging
logging.basicConfig(
    level=settings.LOG_LEVEL,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
)
logger = logging.getLogger(__name__)

SERVICE_NAME = "Predictable Snell Envelope API"


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Async context manager for FastAPI application."""
    logger.info("Starting up...")
    logger.info(
        "Engine limits: budget=%d predictable times, check budget=%d evaluations",
        settings.BUDGET,
        settings.CHECK_BUDGET,
    )
    logger.info(f"{SERVICE_NAME} startup completed")

    yield

    logger.info("Shutting down...")
    logger.info(f"{SERVICE_NAME} shutdown completed")


# Create FastAPI app
app = FastAPI(
    title=SERVICE_NAME,
    description=(
        """
        Exact optimal stopping over predictable times on finite filtered
        probability spaces: value systems, property checks, Mertens
        decomposition and enumeration of predictable stopping times
        """),
    lifespan=lifespan,
)

# Setup global exception handlers
setup_exception_handlers(app)
logger.info("Exception handlers configured")


@app.get("/")
async def root():
    return {
        "message": f"Welcome to the {SERVICE_NAME}",
        "docs": (
            "/docs"
            if settings.ENV == "development"
            else "Documentation disabled in production"
        ),
        "health": "/health",
        "canonical": "/api/v1/instances/canonical",
    }


# Health check and utility endpoints
@app.get("/health", tags=["Health"])
async def health_check():
    """Health check endpoint for monitoring."""
    return {
        "status": "healthy",
        "service": SERVICE_NAME,
        "version": "1.0.0",
        "environment": settings.ENV,
    }


# Routers
app.include_router(router)
app.include_router(reports_router)


if __name__ == '__main__':
    import uvicorn
    uvicorn.run(
        'src.main:app',
        host=settings.API_HOST,
        port=settings.API_PORT,
        reload=settings.DEBUG,
    )
