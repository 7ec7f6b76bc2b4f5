"""Non-interactive figure rendering for ptwell output files.

Reads the solver CLI's CSV/JSON files verbatim and renders the standard
figure set F1-F8 (secular-surface slices, nodal-curve grids with hyperbola
overlays, root-locus panels, the shallow-well graphical solution) to PNG and
SVG.  No physics is recomputed here: every number on a figure comes from an
input file.
"""

from .figures import FIGURE_IDS, FigureSpec, build_figure, render

__version__ = "0.1.0"

__all__ = ["FigureSpec", "FIGURE_IDS", "build_figure", "render", "__version__"]
