"""Numerical toolkit for kairon fields on flat Minkowski space E^(1,m)."""

__version__ = "0.1.0"
