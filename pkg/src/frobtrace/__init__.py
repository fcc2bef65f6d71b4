"""Frobenius traces of elliptic curves, almost-prime trace censuses and Greaves sieve numerics."""

__version__ = "0.1.0"
