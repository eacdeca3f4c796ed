"""Towers of characteristic p-Frattini covers of finite groups, braid orbits
on their Nielsen classes, and cusp/genus/Schur-quotient diagnostics."""

__version__ = "0.1.0"
