"""Cyclic projective t-designs: construction, search and certification."""

__version__ = "0.1.0"
