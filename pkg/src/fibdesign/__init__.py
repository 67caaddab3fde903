"""Fibonacci designs: parameters, admissibility, development gates, automorphism
bounds and lines on the design variety."""

__version__ = "0.1.0"
