"""Shor's algorithm for the finite-field discrete logarithm: circuits, simulation, resource models."""

__version__ = "0.1.0"
