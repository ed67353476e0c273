"""Numerical laboratory for modular square roots, their additive energies,
bilinear sums with square-root phases and the large sieve for square moduli."""

__version__ = "0.1.0"
