"""Figure generation from experiment CSV outputs."""

from .render import KINDS, PlotError, PlotJob, moving_average, read_columns, render

__version__ = "0.1.0"

__all__ = [
    "KINDS",
    "PlotError",
    "PlotJob",
    "moving_average",
    "read_columns",
    "render",
    "__version__",
]
