"""
FastAPI Application

This module serves the sparse polynomial solvers over HTTP.

Current Implementation:
- FastAPI with lifespan management
- Solve, certify and lift endpoints (router/solve.py)
- CORS middleware driven by ALLOWED_ORIGINS
- Daily log files with automatic cleanup

Architecture:
- Requests carry the polynomial system inline (same JSON layout as system files)
- Compute handlers are synchronous and run in FastAPI's thread pool
- Bench worker pools are shut down with the application
"""

import logging
import os
from contextlib import asynccontextmanager

import uvicorn
from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from common.dispatch import METHODS
from common.logging_setup import setup_logging
from config import settings
from router.solve import router as solve_router
from services import services

# Initialize logger for this module
logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    """
    Lifespan context manager for FastAPI app startup and shutdown.
    """
    # Startup
    setup_logging(log_to_file=True)
    logger.info(f"🚀 Initializing {settings.PROJECT_NAME} ({settings.ENVIRONMENT})...")
    logger.info("✅ Service ready with methods: %s", ", ".join(METHODS))

    yield

    # Shutdown
    services.close_all()


app = FastAPI(
    title=f"{settings.PROJECT_NAME}",
    version="1.0.0",
    description="Sparse solutions of polynomial systems via monomial lifting",
    lifespan=lifespan,
)


@app.get("/health", summary="Health check")
async def health_check():
    return {
        "status": "healthy",
        "project": settings.PROJECT_NAME,
        "environment": settings.ENVIRONMENT,
        "methods": list(METHODS),
    }


# CORS middleware for browser clients
app.add_middleware(
    CORSMiddleware,
    allow_origins=settings.ALLOWED_ORIGINS_LIST,  # Driven by ALLOWED_ORIGINS in .env
    allow_credentials=True,
    allow_methods=["GET", "POST", "OPTIONS"],
    allow_headers=["*"],
)

app.include_router(solve_router, tags=["solve"])


if __name__ == "__main__":
    # Make port configurable from environment (default 8000)
    port = int(os.getenv("PORT", "8000"))
    uvicorn.run(app, host="0.0.0.0", port=port)
