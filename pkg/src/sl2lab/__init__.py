"""Computational laboratory for expansion in Cayley graphs of SL(2, p)."""

__version__ = "0.1.0"
