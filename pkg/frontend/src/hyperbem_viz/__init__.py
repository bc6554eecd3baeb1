"""Rendering of hyperbem run artifacts (CSV) into publication-style figures."""

from .io import SchemaError, load_csv, classify
from .render import render_trace, render_field, render_mesh, render_convergence

__all__ = ["SchemaError", "load_csv", "classify", "render_trace",
           "render_field", "render_mesh", "render_convergence"]
