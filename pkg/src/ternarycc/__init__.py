"""Coherent configurations of small degree: construction, WL closure, schurity."""

__version__ = "0.1.0"
