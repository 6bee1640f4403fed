"""Algebraic solvability of two-variable purely quadratic complex ODE systems."""

__version__ = "0.1.0"
