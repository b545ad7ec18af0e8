"""Desk-scale computations around the density bound for sphere packings."""

__version__ = "0.1.0"
