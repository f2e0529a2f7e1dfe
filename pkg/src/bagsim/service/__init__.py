"""HTTP/JSON service exposing graph management, inference and sensitivity."""

from .app import create_app

__all__ = ["create_app"]
