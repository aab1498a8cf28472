"""Computational kernel reproducing a Frobenius-length counterexample over a
five-dimensional Gorenstein ring in characteristic 2."""

__version__ = "0.1.0"
