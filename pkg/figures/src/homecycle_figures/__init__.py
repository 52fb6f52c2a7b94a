"""Batch figure rendering for homecycle result CSVs.

Reads only the engine's published CSV tables and never recomputes statistics:
every plotted value is taken verbatim from the file.
"""

from homecycle_figures.render import FigureSpec, render

__all__ = ["FigureSpec", "render"]

__version__ = "0.1.0"
