"""Batch figure rendering for satris experiment CSVs."""

from .render import PlotSpec, RenderResult, render

__all__ = ["PlotSpec", "RenderResult", "render"]
__version__ = "0.1.0"
