"""Determinant null witness for the Schmidt number of bipartite states."""

__version__ = "0.1.0"
