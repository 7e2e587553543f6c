"""Figure rendering for qdiff1d CSV outputs."""

from .figures import KINDS, FigureSpec, SchemaError, render

__all__ = ["KINDS", "FigureSpec", "SchemaError", "render"]

__version__ = "0.1.0"
