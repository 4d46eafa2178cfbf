"""Exact and numerical harmonic analysis on stepwise square integrable nilpotent groups."""

__version__ = "0.1.0"
