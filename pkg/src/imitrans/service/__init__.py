"""HTTP service exposing transduction, the expert oracle, and scoring."""

from .app import create_app

__all__ = ["create_app"]
