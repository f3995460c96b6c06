"""Static figure renderer for twoway-covert CSV outputs."""

from .render import (CAPACITY_COLUMNS, PTS_COLUMNS, SCALING_COLUMNS,
                     FigureKind, PlotJob, render_regions, render_scaling)

__version__ = "0.1.0"

__all__ = [
    "CAPACITY_COLUMNS",
    "PTS_COLUMNS",
    "SCALING_COLUMNS",
    "FigureKind",
    "PlotJob",
    "render_regions",
    "render_scaling",
]
