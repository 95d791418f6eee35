"""Lie-group toolkit for rotations and rigid motions, with estimation utilities."""

__version__ = "0.1.0"
