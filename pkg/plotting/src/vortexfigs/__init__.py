"""Publication-style figures from vortexsans data exports.

This package never computes physics: it reads the CSV and binary grid
files the simulation toolkit writes and renders them.  Four figure kinds
are supported: intensity heatmaps (qmap), polarization maps (ximap), curve
overlays (curves) and analytic-versus-numeric donut comparisons
(donut_compare).
"""

from .render import FigureRecipe, RecipeError, render

__all__ = ["FigureRecipe", "RecipeError", "render"]
