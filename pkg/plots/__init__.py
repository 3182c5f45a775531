"""Figure rendering for run artifacts.

Consumes only the serialized artifacts written by the sampler CLI
(densities and TV tables as CSV, mixtures as JSON, fields as CSV
matrices) and renders the five standard figure kinds.  This package
never imports the sampler library; the file formats are the contract.
"""

from .figures import FIGURE_KINDS, FigureSpec, render
from .readers import SchemaError

__all__ = ["FIGURE_KINDS", "FigureSpec", "render", "SchemaError"]
