"""Figure rendering for qrisac experiment outputs (CSV + manifest in, PNG out)."""

from .render import FIGURES, FigureSpec, NoDataError, SchemaError, render

__all__ = ["FIGURES", "FigureSpec", "NoDataError", "SchemaError", "render"]
__version__ = "0.1.0"
