from .figures import FigureSpec, KINDS, PlotError, load_rows, plot

__all__ = ["FigureSpec", "KINDS", "PlotError", "load_rows", "plot"]
