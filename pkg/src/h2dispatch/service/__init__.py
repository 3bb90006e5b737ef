"""HTTP facade over the dispatch library (FastAPI + pydantic schemas)."""

from .app import app, create_app

__all__ = ["app", "create_app"]
