"""Figure rendering for detuneforge CSV artifacts."""

from .render import FIGURE_IDS, FigureSpec, build_figure, render

__version__ = "0.1.0"
