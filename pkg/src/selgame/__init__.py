"""Finite-horizon simulation of topological selection games."""

__version__ = "0.1.0"
