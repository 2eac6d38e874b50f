"""Rendering of becavity experiment artifacts into publication-style figures."""

from .figures import FigureSpec, SchemaError, render

__all__ = ["FigureSpec", "SchemaError", "render"]

__version__ = "0.1.0"
