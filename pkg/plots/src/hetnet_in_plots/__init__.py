"""Figure-reproduction scripts for hetnet-in CSV outputs."""

from .errors import ConfigError, EmptyInput, MissingColumn, PlotsError
from .render import FIGURE_KINDS, PlotSpec, render

__version__ = "0.1.0"
