"""Exact symbolic verification of Capelli-type generating functions for the
classical Hermitian symmetric pairs SO*(2n), Sp(n, R) and SU(p, q)."""

__version__ = "0.1.0"
