"""Flavor-palate clustering and price/quality wine recommendation."""

__version__ = "0.1.0"
