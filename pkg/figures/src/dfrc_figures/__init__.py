"""Figure rendering for the wideband DFRC simulator's CSV outputs."""

from .plots import FigureSpec, plot_convergence, plot_sweep, read_csv, render

__all__ = ["FigureSpec", "plot_convergence", "plot_sweep", "read_csv", "render"]

__version__ = "0.1.0"
