"""Figure scripts for the solver's CSV/JSON outputs."""

__version__ = "0.1.0"

from .figures import FIGURE_IDS, FigureSpec, render
from .schemas import SchemaError

__all__ = ["FIGURE_IDS", "FigureSpec", "render", "SchemaError"]
