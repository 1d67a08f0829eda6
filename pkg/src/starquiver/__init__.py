"""Exact symbolic workbench for 3-armed star quiver moduli and determinantal surfaces."""

__version__ = "0.1.0"
