"""Console entry point; the implementation lives in the service package."""

from .service.cli import main

__all__ = ["main"]
