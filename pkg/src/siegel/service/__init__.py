"""FastAPI service wrapping the verification toolkit."""

from .app import create_app

__all__ = ["create_app"]
