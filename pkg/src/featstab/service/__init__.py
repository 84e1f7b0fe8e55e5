"""HTTP service wrapping the stability measures.

Run with ``uvicorn featstab.service.app:app`` or ``featstab serve``.
"""

from .app import app

__all__ = ["app"]
