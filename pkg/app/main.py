"""
FastAPI main application entry point.
"""
import logging

from fastapi import FastAPI, Request, status
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from app.config import settings
from app.exceptions import (
    BudgetExceededError,
    ConfigurationError,
    ConstructionError,
    ParseError,
    SemanticError,
)
from app.routers import analysis, constructions

# Configure logging
logging.basicConfig(
    level=getattr(logging, settings.log_level.upper(), logging.INFO),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

app = FastAPI(
    title="Timed Specification Theory API",
    description="Refinement distances, composition, quotient and conjunction of timed modal specifications",
    version="1.0.0"
)

# CORS middleware
app.add_middleware(
    CORSMiddleware,
    allow_origins=settings.cors_origins_list,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


# Exception handler for 422 validation errors
@app.exception_handler(RequestValidationError)
async def validation_exception_handler(request: Request, exc: RequestValidationError):
    """Return 422 validation errors in a consistent JSON format."""
    return JSONResponse(
        status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
        content={
            "detail": exc.errors(),
            "body": str(exc.body) if hasattr(exc, "body") else None,
        },
    )


@app.exception_handler(ParseError)
async def parse_error_handler(request: Request, exc: ParseError):
    return JSONResponse(
        status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
        content={"detail": exc.message, "line": exc.line, "column": exc.column},
    )


@app.exception_handler(SemanticError)
@app.exception_handler(ConfigurationError)
async def input_error_handler(request: Request, exc: Exception):
    return JSONResponse(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, content={"detail": str(exc)})


@app.exception_handler(BudgetExceededError)
async def budget_error_handler(request: Request, exc: BudgetExceededError):
    logger.warning(f"Request aborted: {exc}")
    return JSONResponse(status_code=status.HTTP_413_REQUEST_ENTITY_TOO_LARGE, content={"detail": str(exc)})


@app.exception_handler(ConstructionError)
async def construction_error_handler(request: Request, exc: ConstructionError):
    return JSONResponse(status_code=status.HTTP_409_CONFLICT, content={"detail": str(exc)})


# Include routers
app.include_router(analysis.router, prefix="/api/v1", tags=["analysis"])
app.include_router(constructions.router, prefix="/api/v1", tags=["constructions"])


@app.on_event("startup")
async def startup_event():
    """Log configuration on startup."""
    logger.info("=" * 60)
    logger.info("Starting Timed Specification Theory API")
    logger.info("=" * 60)
    logger.info(f"Default grid step: {settings.default_step}")
    logger.info(f"MECS semantics: {settings.delay_mode} delays, {settings.timing} timing")
    logger.info(f"State budget: {settings.state_budget}")
    logger.info(f"API running on: http://{settings.api_host}:{settings.api_port}")
    logger.info("=" * 60)


@app.get("/")
async def root():
    """Health check endpoint."""
    return {
        "message": "Timed Specification Theory API is running",
        "status": "ok",
        "timing": settings.timing,
        "delay_mode": settings.delay_mode,
    }


@app.get("/health")
async def health():
    """Health check endpoint."""
    return {"status": "healthy"}
